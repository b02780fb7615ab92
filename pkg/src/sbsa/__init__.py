"""Semi-classical signal analysis: soliton decomposition of pulse signals,
spectral invariants and beat-to-beat arterial pressure indices."""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    BracketError,
    DegenerateInputError,
    DomainError,
    InsufficientDataError,
    InvalidInputError,
    NoBoundStateError,
    NumericError,
    SbsaError,
    SegmentationError,
)
from .invariants import (  # noqa: E402
    InvariantSet,
    invariant_set,
    lieb_thirring_constant,
    riesz_mean,
    semiclassical_reference,
)
from .pipeline import (  # noqa: E402
    BeatConfig,
    BeatRecord,
    BeatWindow,
    BrsPair,
    Predictor,
    SegmentationConfig,
    analyze_beat,
    analyze_recording,
    brs_pairs,
    segment_beats,
)
from .signal import Signal  # noqa: E402
from .spectral import (  # noqa: E402
    SpectralDecomposition,
    TridiagonalOperator,
    count_negative_eigenvalues,
    decompose,
    discretize_operator,
    negative_spectrum,
)
from .stats import (  # noqa: E402
    linear_regression,
    significance_stars,
    summarize,
    wilcoxon_signed_rank,
)
from .transform import (  # noqa: E402
    ChiMode,
    ChiSelectionConfig,
    PhaseSplit,
    SbsaResult,
    auto_norming_constants,
    reconstruct,
    relative_mse,
    select_chi,
    soliton_component,
    split_phases,
    synthesize_reflectionless,
)
