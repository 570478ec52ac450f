"""chaoslab: analysis of discrete-time linear inclusion systems.

The central objects are a finite family of invertible matrices (a
``MatrixSystem``) and infinite switching laws selecting one matrix per
step.  The library constructs laws whose orbits oscillate between decay
to zero and unbounded growth, certifies that behavior, and measures the
opposite regime: periodic stability, joint spectral radius brackets, and
polynomial growth of product norms.
"""

from ._version import __version__
from .errors import BudgetExceededError, InvalidInputError, NonConvergenceError
from .linalg import (
    LogScaledMatrix,
    Spectrum,
    as_matrix,
    co_norm,
    op_norm,
    spectral_radius,
    sym_eigs,
    word_product,
)
from .switching import (
    BlockLaw,
    ConstructedLaw,
    ExplicitLaw,
    PeriodicLaw,
    RunProfile,
    SwitchingLaw,
    Word,
    doubling_law,
    enumerate_necklaces,
    enumerate_words,
    law_from_spec,
    law_metric,
    law_to_spec,
    run_profile,
)
from .chaos import (
    CONTRACTING,
    EXPANDING_OR_NEUTRAL,
    ChaosCertificate,
    CrossingEntry,
    CrossingTable,
    MatrixSystem,
    PeriodicVerdict,
    Refusal,
    Trajectory,
    WitnessPair,
    WitnessSearch,
    chaos_scan,
    classify_periodic,
    construct_chaotic_law,
    certificate_law,
    find_witness,
    recheck_certificate,
    simulate,
    verify_witness,
)
from .runs import (
    CONSISTENT,
    DECAYING,
    INCONSISTENT,
    NOT_DECAYING,
    DecayReport,
    RunEvidence,
    decay_check,
    run_evidence,
)
from .stability import (
    BOUNDED_SO_FAR,
    GROWING,
    GrowthCurve,
    IrreducibilityReport,
    JsrBracket,
    LyapunovEstimate,
    NormTable,
    ProbeReport,
    RestrictionProbe,
    StabilityVerdict,
    build_shear_block_system,
    extremal_norm_estimate,
    growth_curve,
    growth_verdict,
    irreducibility,
    jsr_bracket,
    lyapunov_mc,
    periodic_stability,
    polynomial_growth_exponent,
    product_unbounded_probe,
    shear_pair,
)
from .specfiles import build_report, load_law, load_system, save_law

__all__ = [
    "__version__",
    "BudgetExceededError",
    "InvalidInputError",
    "NonConvergenceError",
    "LogScaledMatrix",
    "Spectrum",
    "as_matrix",
    "co_norm",
    "op_norm",
    "spectral_radius",
    "sym_eigs",
    "word_product",
    "BlockLaw",
    "ConstructedLaw",
    "ExplicitLaw",
    "PeriodicLaw",
    "RunProfile",
    "SwitchingLaw",
    "Word",
    "doubling_law",
    "enumerate_necklaces",
    "enumerate_words",
    "law_from_spec",
    "law_metric",
    "law_to_spec",
    "run_profile",
    "CONTRACTING",
    "EXPANDING_OR_NEUTRAL",
    "ChaosCertificate",
    "CrossingEntry",
    "CrossingTable",
    "MatrixSystem",
    "PeriodicVerdict",
    "Refusal",
    "Trajectory",
    "WitnessPair",
    "WitnessSearch",
    "chaos_scan",
    "classify_periodic",
    "construct_chaotic_law",
    "certificate_law",
    "find_witness",
    "recheck_certificate",
    "simulate",
    "verify_witness",
    "CONSISTENT",
    "DECAYING",
    "INCONSISTENT",
    "NOT_DECAYING",
    "DecayReport",
    "RunEvidence",
    "decay_check",
    "run_evidence",
    "BOUNDED_SO_FAR",
    "GROWING",
    "GrowthCurve",
    "IrreducibilityReport",
    "JsrBracket",
    "LyapunovEstimate",
    "NormTable",
    "ProbeReport",
    "RestrictionProbe",
    "StabilityVerdict",
    "build_shear_block_system",
    "extremal_norm_estimate",
    "growth_curve",
    "growth_verdict",
    "irreducibility",
    "jsr_bracket",
    "lyapunov_mc",
    "periodic_stability",
    "polynomial_growth_exponent",
    "product_unbounded_probe",
    "shear_pair",
    "build_report",
    "load_law",
    "load_system",
    "save_law",
]
