"""Link-level simulator and analytical-bound toolkit for multi-source
two-path relay networks with complex-field precoding and physical-layer
network coding at the relays."""

from .analysis import (
    BoundReport,
    compute_bound_report,
    error_count_distribution,
    p_case2,
    p_prime,
    p_triple_prime,
    pe_k,
    pe_rd,
    pe_rd_rayleigh,
    pe_sr,
    q_function,
    rayleigh_pairwise_rd,
    rayleigh_pe_sr,
    t_cfnc_lower_bound,
    t_new_lower_bound,
)
from .channel import (
    AWGN,
    RAYLEIGH,
    ChannelRealization,
    FadingProfile,
    add_noise,
    awgn_profile,
    crandn,
    pathloss_db,
    rayleigh_profile,
    sample_realization,
    sample_realizations,
    snr_db_to_n0,
    snr_from_pathloss,
)
from .constellation import (
    BPSK,
    QPSK,
    Alphabet,
    LabeledConstellation,
    PrecodingVector,
    build_faded_sum_constellation,
    build_source_constellation,
    build_sum_constellation,
    enumerate_vectors,
    get_alphabet,
    make_custom_theta,
    make_vandermonde_theta,
    sum_alphabet,
)
from .detection import (
    DetectionResult,
    detect_destination,
    detect_destination_mrc,
    detect_relay_awgn,
    detect_relay_fading,
)
from .errors import (
    ConfigError,
    DomainError,
    InjectivityViolation,
    InsufficientSamples,
    NonPositiveDistance,
    SimulatorError,
    UnknownFigure,
    UnsupportedSize,
)
from .harness import (
    CSV_COLUMNS,
    ExperimentConfig,
    config_from_dict,
    estimate_ci,
    reproduce_figure,
    run_bounds,
    run_sweep,
    simulate_point,
)
from .pnc import PncMapper, f_bpsk, f_qpsk, g_bpsk, g_qpsk, get_mapper
from .protocol import (
    SCHEME_BASELINE,
    SCHEME_TWOPATH,
    FrameConfig,
    FrameLog,
    FrameScore,
    recover_sources,
    run_baseline_frame,
    run_twopath_frame,
    score_frame,
)

__version__ = "0.1.0"
