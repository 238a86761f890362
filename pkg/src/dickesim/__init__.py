"""Simulator for ensembles of N two-level systems under collective processes.

States live in the Dicke basis |j, m>, stored block-diagonally per total-spin
sector j, so memory and time scale polynomially in N instead of 4^N.
"""

from .dicke import (
    BlockLedger,
    CollectiveOperator,
    CollectiveState,
    build_ledger,
    collective_dimension,
    css_state,
    degeneracy,
    excited_state,
    ghz_state,
    ground_state,
    op_jx,
    op_jy,
    op_jz,
    op_jminus,
    op_jplus,
)
from .errors import (
    CircuitParseError,
    DegenerateFrameError,
    DomainError,
    NumericError,
    ResourceError,
    UnsupportedConfigError,
)
from .gates import (
    GATE_KINDS,
    Circuit,
    GateSpec,
    apply_circuit,
    apply_gate,
    circuit_from_json,
    circuit_to_json,
    exponentiate,
    generator,
)
from .measurement import (
    OBSERVABLES,
    ProbTable,
    ShotCounts,
    expval,
    husimi_csv,
    husimi_grid,
    prob_table_csv,
    probabilities,
    sample,
    shot_counts_csv,
)
from .noise import TransitionTable, depolarize, rho_prime
from .oracle import (
    FULL_SPACE_CAP,
    extract_collective,
    full_apply_gate,
    full_collective_ops,
    full_depolarize,
    full_run,
    jm_projectors,
)
from .squeezing import MeanSpinFrame, get_xi_2_R, get_xi_2_S, mean_spin_frame
from .vqa import (
    DEFAULT_TNT_COUPLING,
    TNT_COUPLING_READINGS,
    Ansatz,
    AdamState,
    FitResult,
    OptimizerConfig,
    adam_step,
    cost,
    fit,
    fubini_study_metric,
    gd_step,
    grad_findiff,
    qng_step,
    tnt_coupling_value,
)

__version__ = "0.1.0"

__all__ = [
    "AdamState",
    "Ansatz",
    "BlockLedger",
    "Circuit",
    "CircuitParseError",
    "CollectiveOperator",
    "CollectiveState",
    "DEFAULT_TNT_COUPLING",
    "DegenerateFrameError",
    "DomainError",
    "FULL_SPACE_CAP",
    "FitResult",
    "GATE_KINDS",
    "GateSpec",
    "MeanSpinFrame",
    "NumericError",
    "OBSERVABLES",
    "OptimizerConfig",
    "ProbTable",
    "ResourceError",
    "ShotCounts",
    "TNT_COUPLING_READINGS",
    "TransitionTable",
    "UnsupportedConfigError",
    "adam_step",
    "apply_circuit",
    "apply_gate",
    "build_ledger",
    "circuit_from_json",
    "circuit_to_json",
    "collective_dimension",
    "cost",
    "css_state",
    "degeneracy",
    "depolarize",
    "excited_state",
    "expval",
    "exponentiate",
    "extract_collective",
    "fit",
    "fubini_study_metric",
    "full_apply_gate",
    "full_collective_ops",
    "full_depolarize",
    "full_run",
    "gd_step",
    "generator",
    "get_xi_2_R",
    "get_xi_2_S",
    "ghz_state",
    "grad_findiff",
    "ground_state",
    "husimi_csv",
    "husimi_grid",
    "prob_table_csv",
    "shot_counts_csv",
    "jm_projectors",
    "mean_spin_frame",
    "op_jminus",
    "op_jplus",
    "op_jx",
    "op_jy",
    "op_jz",
    "probabilities",
    "qng_step",
    "rho_prime",
    "sample",
    "tnt_coupling_value",
    "__version__",
]
