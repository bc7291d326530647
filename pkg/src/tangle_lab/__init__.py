"""Entanglement measures and rank-2 convex roofs for small qubit systems."""

from .config import TOL, Tolerances, load_tolerances
from .errors import (
    BracketError,
    DegenerateFamilyError,
    InvalidStateError,
    InvalidSubsetError,
    MeasureEvaluationError,
    MonogamyViolationError,
    SingularFamilyError,
    TangleLabError,
    UnknownStateError,
    UnsupportedExponentError,
    UNSUPPORTED,
)
from .kernels import backend
from .states import (
    DensityMatrix,
    Ensemble,
    PureState,
    QubitSubset,
    amplitudes_equal,
    ensemble_to_density,
    named_state,
    partial_trace,
    partial_transpose,
    random_density_matrix,
    random_pure_state,
    spectral_ensemble,
    states_equal_up_to_phase,
    tensor_product,
)
from .bipartite import (
    ConcurrenceClosedForm,
    NegativityClosedForm,
    closed_form_concurrence_Z4,
    closed_form_negativity_Z4,
    concurrence_mixed,
    concurrence_one_vs_rest,
    concurrence_pure,
    eof_from_concurrence,
    negativity,
)
from .multipartite import (
    PauliContext,
    ThreeTangleCoefficients,
    f_invariants,
    g_monotones,
    residual_g1g2_mixture,
    residual_ghzw_mixture,
    residual_reduced_pure,
    three_tangle_pure,
)
from .monogamy import (
    MonogamyReport,
    PowerFactors,
    check_monogamy_tofv,
    n1,
    n1_reports,
    n2,
    n2_reports,
    nu_star,
    t1,
    t1_reports,
    t2,
    t2_reports,
)
from .roof import (
    AppendixTau3Params,
    CharacteristicCurveSet,
    ConvexRoofResult,
    Rank2Family,
    ReducedTripartite,
    RoofPoint,
    appendix_envelope,
    appendix_family,
    appendix_phi0,
    appendix_target,
    appendix_tau3,
    appendix_zeros,
    characteristic_curves,
    ghz3w3_family,
    ghzw4_family,
    lower_convex_envelope,
    n1_inf_anchor,
    n1_roof_ghzw4,
    n1_star_breakpoint,
    n2_inf_anchors,
    n2_roof_ghzw4,
    n2_star_breakpoint,
    reduced_tripartite_spectral,
    rho4_ghzw4,
    solve_roof_ghzw4,
    stationary_mix_point,
    t1_roof_ghzw4,
    tau_reduced_upper_bound,
    verify_decomposition,
)

__version__ = "0.1.0"
