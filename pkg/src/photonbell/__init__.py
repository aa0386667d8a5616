"""Single-photon two-qubit states: preparation, Bell-basis measurement and key exchange."""

from .circuits import (
    BELL_ANALYZER,
    BPRIME_RECEIVER,
    B_ANALYZER,
    OutcomeDistribution,
    PrepSettings,
    b_basis_probs,
    bell_analyzer_probs,
    bprime_receiver_probs,
    prepare,
    settings_for,
)
from .detection import ChannelNoise, CountTable, DetectorModel, apply_channel, phase_sweep, run_confusion, sample_trial
from .elements import OpticalElement, apply, compose, hwp, pbs, phase_shifter
from .qkd import QkdParams, QkdReport, run_qkd
from .states import (
    AlphabetLabel,
    BellLabel,
    BPrimeLabel,
    PhotonState,
    Polarization,
    ProductLabel,
    SpatialMode,
    bell_state,
    bprime_state,
    fidelity,
    inner_product,
    make_basis_state,
    sender_alphabet_state,
)

__version__ = "0.1.0"
