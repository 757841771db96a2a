"""Time-adaptive spectrograms by Rényi-entropy window selection, with
perfect weighted overlap-add reconstruction."""

from .adaptive import (AdaptiveSpectrogram, AnalysisPlan, MultiFrameConfig, SelectionTrack,
                       adapt, evaluate_segment, plan, preweight_segment, select_best)
from .entropy import ProbabilityDensity, RenyiOrder, dm_family, normalize_region, renyi_entropy
from .errors import *  # noqa: F401,F403
from .resynthesis import apply_mask, denominator_profile, reconstruct, reduced_frame
from .signal import ScaleSet, Signal, Window, make_hanning, scale_window, synth_test_signal
from .stft import (Lattice, SpectrogramTile, StftMatrix, dft_forward, dft_inverse,
                   frame_bounds_diag, overlap_sum, spectrogram, stft)

__version__ = "0.1.0"
