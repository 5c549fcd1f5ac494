"""Greedy sparse representation in reproducing kernel Hilbert spaces under a
complete dictionary of kernels and their derivatives."""

from .errors import (
    AllCandidatesDependent,
    AmucdError,
    BandViolation,
    DomainViolation,
    LinearDependence,
    MultiplicityError,
    NumericalConsistencyError,
    OrderCapExceeded,
    ParseError,
    SchemaError,
    SingularSystem,
    SpaceMismatch,
)
from .gram import (
    Decomposition,
    GramSystem,
    build_gram,
    orthonormal_extend,
    project,
    reconstruct_at,
    residual_energy,
)
from .greedy import (
    CandidateGrid,
    GreedyState,
    StoppingRule,
    bvc_ratio,
    decompose,
    project_fixed_points,
    score_candidate,
    select_next,
)
from .rkhs import (
    DictionaryElement,
    KernelCombination,
    SpaceModel,
    Spectrum,
    TaylorPolynomial,
    kernel_mixed_derivative,
    kernel_signal,
    signal_eval,
    signal_moment,
    signal_norm_sq,
)

__version__ = "0.1.0"
