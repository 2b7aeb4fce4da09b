from supframe.frames.signal import (
    SupportInfo,
    Window,
    dft,
    dft_support,
    inverse_dft,
    modulate,
    translate,
    window_length,
)
from supframe.frames.windows import make_window
from supframe.frames.gabor import (
    FrameBounds,
    FrameOperator,
    GaborSystem,
    covering_condition,
    frame_bounds,
    frame_operator,
    refine_lattice,
    stft_analyze,
)
from supframe.frames.superposition import (
    CoefficientSet,
    Mode,
    OrderedPartition,
    Piece,
    SelectionFunction,
    SufficiencyReport,
    SuperpositionWindow,
    make_selection,
    superposition_analyze,
    superposition_bounds,
    superposition_frame_operator,
    superposition_window,
    sufficiency_test,
    validate_partition,
)
from supframe.frames.reconstruct import (
    DualFrame,
    DualOrigin,
    DualProfiles,
    LappedSets,
    OlaCertificate,
    canonical_dual,
    count_multiplies,
    dual_reconstruct,
    dyadic_duals,
    gola_reconstruct,
    lapped_duals,
    lapped_sets,
    neighbor_overlap_check,
    ola_check,
    ola_reconstruct,
)
