"""Link-level simulator for a chirp-scrambled AFDM waveform.

The transform layer lives in :mod:`seafdm.daft`, keystream and schedule
handling in :mod:`seafdm.keystream`, the transmit/receive chains in
:mod:`seafdm.waveform`, the doubly dispersive channel in
:mod:`seafdm.channel`, MMSE detection in :mod:`seafdm.detection`,
closed-form security analytics in :mod:`seafdm.sinr`, and the experiment
harness plus CLI in :mod:`seafdm.harness` / :mod:`seafdm.cli`.
"""

from .channel import (
    ChannelRealization,
    EffectiveChannel,
    PathSpec,
    apply_channel,
    awgn,
    coupling_kernel,
    effective_channel,
    effective_channel_closed_form,
    sample_channel,
)
from .daft import (
    FrameParams,
    SignalBlock,
    add_cpp,
    chirp_diag,
    daft,
    daft_matrix,
    idaft,
    remove_cpp,
)
from .detection import DetectionResult, count_errors, demap, detect, mmse_equalize
from .exceptions import ConfigError, ContractViolation, SolverError
from .harness import (
    EVE_MODES,
    SCENARIOS,
    ExperimentConfig,
    TrialRecord,
    emit_csv,
    read_csv,
    run_scenario,
    run_sinr_curve,
    search_space_summary,
    wilson,
)
from .keystream import (
    DEFAULT_TAPS,
    C2Schedule,
    Codebook,
    Lfsr,
    bias_between,
    build_codebook,
    generate_schedule,
    search_space_bits,
    zero_schedule,
)
from .sinr import (
    LinkBudget,
    SinrCurve,
    eve_sinr_curve,
    measured_sinr,
    sa,
    sinr_bob,
    sinr_eve_average,
    sinr_eve_measured,
    sinr_eve_saturated,
    sinr_eve_symbol,
    sinr_eve_symbol_discrete,
)
from .waveform import (
    Constellation,
    bob_front_end,
    constellation_by_name,
    descramble,
    eve_front_end,
    map_bits,
    qam16,
    qpsk,
    schedule_phases,
    se_afdm_modulate,
)

__version__ = "0.1.0"

__all__ = [
    "ChannelRealization",
    "EffectiveChannel",
    "PathSpec",
    "apply_channel",
    "awgn",
    "coupling_kernel",
    "effective_channel",
    "effective_channel_closed_form",
    "sample_channel",
    "FrameParams",
    "SignalBlock",
    "add_cpp",
    "chirp_diag",
    "daft",
    "daft_matrix",
    "idaft",
    "remove_cpp",
    "DetectionResult",
    "count_errors",
    "demap",
    "detect",
    "mmse_equalize",
    "ConfigError",
    "ContractViolation",
    "SolverError",
    "EVE_MODES",
    "SCENARIOS",
    "ExperimentConfig",
    "TrialRecord",
    "emit_csv",
    "read_csv",
    "run_scenario",
    "run_sinr_curve",
    "search_space_summary",
    "wilson",
    "DEFAULT_TAPS",
    "C2Schedule",
    "Codebook",
    "Lfsr",
    "bias_between",
    "build_codebook",
    "generate_schedule",
    "search_space_bits",
    "zero_schedule",
    "LinkBudget",
    "SinrCurve",
    "eve_sinr_curve",
    "measured_sinr",
    "sa",
    "sinr_bob",
    "sinr_eve_average",
    "sinr_eve_measured",
    "sinr_eve_saturated",
    "sinr_eve_symbol",
    "sinr_eve_symbol_discrete",
    "Constellation",
    "bob_front_end",
    "constellation_by_name",
    "descramble",
    "eve_front_end",
    "map_bits",
    "qam16",
    "qpsk",
    "schedule_phases",
    "se_afdm_modulate",
    "__version__",
]
