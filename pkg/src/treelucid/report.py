"""CSV tables and matplotlib figures for CLI runs.

Every report path writes a delimited table; when a figure makes sense
(surrogate decay, depth profiles, sweep curves, instance geometry) a PNG is
rendered next to the table with the same stem.
"""

from __future__ import annotations

import csv
import math
from pathlib import Path
from typing import Iterable, Optional, Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .boosting import BoostTrace
from .instance import Instance
from .minimax import SweepResult
from .oracle import AboveCap, DepthProfile


def write_csv(path, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


def figure_path(out_path) -> Path:
    return Path(out_path).with_suffix(".png")


def trace_rows(trace: BoostTrace):
    rows = []
    for i in range(trace.phases):
        adv = trace.advantages[i]
        rows.append(
            [
                i + 1,
                f"{trace.surrogates[i + 1]:.12g}",
                "" if adv is None else f"{adv:.12g}",
                int(trace.certified[i]),
            ]
        )
    return rows


def plot_trace(trace: BoostTrace, path, gamma: Optional[float] = None) -> None:
    fig, ax = plt.subplots(figsize=(6, 4))
    phases = range(len(trace.surrogates))
    ax.plot(phases, trace.surrogates, marker="o", label="surrogate")
    if gamma is not None and trace.surrogates[0] > 0:
        bound = [
            trace.surrogates[0] * (1 - 2 * gamma**2) ** i for i in phases
        ]
        ax.plot(phases, bound, linestyle="--", label="certified decay")
    positive = [s for s in trace.surrogates if s > 0]
    if positive and min(positive) < 0.05:
        ax.set_yscale("symlog", linthresh=1e-4)
    ax.set_xlabel("phase")
    ax.set_ylabel("surrogate potential")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def profile_rows(profile: DepthProfile):
    rows = []
    for eps, d in profile.pairs:
        shown = f"AboveCap({d.cap})" if isinstance(d, AboveCap) else d
        rows.append([f"{float(eps):.12g}", shown])
    return rows


def plot_profile(profile: DepthProfile, path) -> None:
    xs, ys = [], []
    for eps, d in profile.pairs:
        xs.append(float(eps))
        ys.append(profile.cap + 1 if isinstance(d, AboveCap) else d)
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.step(xs, ys, where="post", marker="o")
    ax.set_xscale("log")
    ax.invert_xaxis()
    ax.set_xlabel("epsilon")
    ax.set_ylabel("minimal depth")
    ax.axhline(profile.cap + 0.5, color="gray", linestyle=":", linewidth=0.8)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def plot_sweep(tables, labels, gamma: float, path) -> None:
    """Game value versus depth, one line per table, with the 1/2-gamma bar."""
    fig, ax = plt.subplots(figsize=(6, 4))
    for table, label in zip(tables, labels):
        ds = [d for d, _ in table]
        vs = [v for _, v in table]
        ax.plot(ds, vs, marker="o", label=label)
    ax.axhline(0.5 - gamma, color="red", linestyle="--", label="1/2 - gamma")
    ax.set_xlabel("depth d")
    ax.set_ylabel("worst-case game value")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def plot_instance(inst: Instance, path) -> bool:
    """Scatter of coords colored by concept label; no-op without coords."""
    if inst.coords is None:
        return False
    xs = [c[0] for c in inst.coords]
    ys = [c[1] for c in inst.coords]
    colors = ["tab:blue" if b else "tab:orange" for b in inst.concept]
    sizes = [12 + 600 * float(w) for w in inst.weights]
    fig, ax = plt.subplots(figsize=(5, 5))
    ax.scatter(xs, ys, c=colors, s=sizes, edgecolors="none", alpha=0.8)
    ax.set_aspect("equal")
    ax.set_title(f"{inst.n_points} points, {inst.n_hypotheses} stumps")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return True
