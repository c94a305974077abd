"""skewgain: numerical toolkit for coherence-measure monotonicity.

Core objects: validated states and observables (measures), Kraus channels
with the incoherence criterion (channels), explicit gain constructions
(constructions), and a reproducible randomized search (search).
"""

from .channels import (
    KrausChannel,
    apply_channel,
    apply_kraus_to_pure,
    channel_from_dict,
    channel_to_dict,
    compose,
    incoherence_oracle,
    is_incoherent_channel,
    is_incoherent_kraus,
    validate_completeness,
)
from .constructions import (
    CounterexampleInstance,
    construct_case,
    construct_general_d,
    construct_general_placement,
    construct_intro_example,
    cyclic_kraus_family,
    delta_closed_form,
    delta_general_d,
    instance_to_dict,
    placement_amplitudes,
    validate_instance,
)
from .errors import (
    BadEnsemble,
    DegenerateObservable,
    DimensionMismatch,
    IncompleteKrausSet,
    InvalidConfig,
    NotHermitian,
    NotPositiveSemidefinite,
    NotSorted,
    NumericalInstability,
    SkewgainError,
    StateValidation,
)
from .measures import (
    MEASURES,
    ConvexityCheck,
    DensityMatrix,
    DiagonalObservable,
    PureState,
    check_convexity,
    l1_coherence,
    relative_entropy_coherence,
    skew_information,
    skew_information_pure,
)
from .numerics import (
    DEFAULT_TOL,
    HermitianEigenResult,
    ToleranceConfig,
    commutator,
    dagger,
    frobenius_norm,
    hermitian_eigh,
    matmul,
    psd_sqrt,
    trace,
)
from .search import (
    RNG_ALGORITHM,
    MeasureResult,
    SearchConfig,
    ViolationReport,
    minimize_instance,
    report_to_csv,
    report_to_dict,
    run_search,
    sample_incoherent_channel,
)

__version__ = "0.1.0"
