"""Shallow decision-tree approximation of binary concepts over stump classes.

Construct, certify, and bound depth-limited tree approximations on finite
weighted domains: level-by-level boosting with surrogate-decay certificates,
minimax game solving with majority-vote compression, exact minimal-depth
oracles, graded complexity measures over the stump algebra, and the
canonical demo instances exercising all three regimes.
"""

from .errors import (
    ArityError,
    BalanceUndefined,
    BudgetError,
    DerandomizeFailed,
    EmptyCondition,
    PreconditionError,
    SizeCapError,
    StructuralError,
    TreelucidError,
)
from .instance import (
    AtLeast,
    Distribution,
    Hypothesis,
    Instance,
    atoms,
    balanced,
    conditional,
    in_algebra,
    instance_from_json,
    instance_to_json,
    loss,
    mask_loss,
    vc_dimension,
)
from .tree import (
    DecisionTree,
    Internal,
    Leaf,
    behavior_of,
    depth,
    evaluate,
    from_json,
    leaf_regions,
    leaf_tree,
    stack_majority,
    stump_tree,
    surrogate,
    to_dot,
    to_json,
    tree_from_nested,
)
from .oracle import (
    AboveCap,
    DepthProfile,
    best_tree,
    depth_profile,
    enumerate_behaviors,
    min_depth,
    min_loss_by_depth,
    rashomon,
)
from .boosting import (
    AdvantageShortfall,
    BoostConfig,
    BoostTrace,
    CertifyReport,
    certify,
    phase_bound,
    topdown_lbl,
    weak_learn,
)
from .minimax import (
    CompressResult,
    Derandomization,
    GameSolution,
    SweepResult,
    compress,
    derandomize,
    game_value,
    weak_interpretability_sweep,
)
from .gcm import (
    CONNECTIVE_COUNT,
    MAX_DEPTH_STYLE,
    AboveBudget,
    AlgebraExpr,
    Compl,
    Const,
    GradedMeasure,
    Hyp,
    Inter,
    Union,
    check_axioms,
    eval_expr,
    expr_from_json,
    expr_mask,
    expr_to_json,
    gamma_of,
    min_gamma,
    tree_to_algebra,
)
from .demos import (
    FamilyDescriptor,
    TrichotomyVerdict,
    adversarial_mixture,
    build,
    disk_grid,
    geometric_series,
    octagon_tree,
    pn_family,
    trichotomy_classify,
    two_point,
)

__version__ = "0.1.0"
