"""sact: compile binary diagnosis models into situation-action tables and trees.

Given a prior, conditionally independent binary evidence with likelihoods, a
2x2 utility table, and cost constants, this package computes the net value of
run-time probabilistic inference versus precompiled situation-action
knowledge, selects what to compile, and emits the compiled artifacts.
"""

from .errors import (
    CapExceededError,
    DigestMismatchError,
    DomainError,
    FormatError,
    MethodError,
    ObservationError,
    SactError,
    UnknownEvidenceError,
)
from .exact import (
    ExactEvaluation,
    exact_ev_compute,
    exact_ev_subset,
    exact_tail,
    exhaustive_subset_search,
)
from .gaussian import (
    GaussianEvaluation,
    MomentSummary,
    evidence_moments,
    gaussian_ev_subset,
    gaussian_tail,
    normal_cdf,
    sum_moments,
)
from .model import (
    Action,
    CostModel,
    DiagnosisModel,
    EvidenceVariable,
    Observation,
    Threshold,
    UtilityTable,
    Violation,
    WeightPair,
    model_digest,
    model_from_dict,
    model_from_json,
    model_to_dict,
    model_to_json,
    optimal_action,
    posterior_odds,
    threshold,
    validate_model,
    weight_pair,
)
from .niv import (
    ComputePolicy,
    NivReport,
    PolicyChoice,
    TablePolicy,
    TreePolicy,
    compare_policies,
    memory_costs,
    niv,
    processing_costs,
)
from .profiles import (
    LossCurve,
    LossRow,
    PRESETS,
    WeightProfile,
    export_analysis,
    export_moments,
    loss_curve,
    realize_profile,
    topn_subset,
)
from .table import (
    CompiledTable,
    SelectionStep,
    SelectionTrace,
    compile_table,
    greedy_select,
    read_table,
    table_lookup,
    write_table,
)
from .tree import (
    BuildTrace,
    ExpansionStep,
    Internal,
    Leaf,
    SituationActionTree,
    build_tree,
    count_nodes,
    export_tree,
    tree_ev,
    tree_from_json,
    tree_lookup,
    tree_niv,
)

__version__ = "0.1.0"
