"""Link-level simulator and verification toolkit for a two-transmitter,
two-receiver MIMO X-network built on column-cancellation space-time codes.

The pieces compose in pipeline order:

* constellations / codes: symbol alphabets and linear code generators,
  including the cancellation spec each transmit-ready code carries.
* network: channel draws, inverting precoders, frame assembly, the
  receiver-side cancellation step, and the square real effective system.
* decoder: exact joint ML decisions, by exhaustive enumeration or by a
  sphere search with a compiled kernel and a pure NumPy fallback.
* checks: algebraic certificates (cancellation residuals, difference
  ranks, the commutator criterion, a determinant identity) and empirical
  statistics (effective-system rank fractions, diversity slope fits).
* sim: reproducible Monte Carlo BER sweeps with CSV persistence.

The xnetsim command line exposes simulate/verify/rankstats/slope.
"""

from .checks import (
    check_cancellation,
    check_commutator,
    check_det_identity,
    check_full_rank,
    commutator_max_rank,
    construct_commutator_witness,
    effective_rank_stats,
    eig_multiplicity_ok,
    estimate_diversity_slope,
)
from .codes import (
    CancellationSpec,
    StbcCode,
    UnitaryMap,
    cc_normalized,
    code_by_name,
    codebook_iter,
    encode,
    make_alamouti,
    make_lowdelay_m3,
    make_perfect3,
    make_replicated,
    make_srinath_rajan,
    make_threaded_full_rate,
)
from .constellations import Constellation, by_name as constellation_by_name
from .decoder import DecodeResult, count_errors, ml_exhaustive, sphere_decode
from .network import (
    ChannelRealization,
    PrecoderSet,
    RealEffectiveSystem,
    Snr,
    alignment_precoders,
    assemble_transmit,
    build_effective_real_system,
    cancel_interference,
    draw_channel,
    receive,
    stacking_det_closed_form,
    stacking_det_witness,
    transmit_scale,
)
from .sim import PointResult, SimConfig, SweepResult, read_csv, run_sweep, write_csv

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "Constellation",
    "constellation_by_name",
    "CancellationSpec",
    "StbcCode",
    "UnitaryMap",
    "cc_normalized",
    "code_by_name",
    "codebook_iter",
    "encode",
    "make_alamouti",
    "make_lowdelay_m3",
    "make_perfect3",
    "make_replicated",
    "make_srinath_rajan",
    "make_threaded_full_rate",
    "ChannelRealization",
    "PrecoderSet",
    "RealEffectiveSystem",
    "Snr",
    "alignment_precoders",
    "assemble_transmit",
    "build_effective_real_system",
    "cancel_interference",
    "draw_channel",
    "receive",
    "stacking_det_closed_form",
    "stacking_det_witness",
    "transmit_scale",
    "DecodeResult",
    "count_errors",
    "ml_exhaustive",
    "sphere_decode",
    "check_cancellation",
    "check_commutator",
    "check_det_identity",
    "check_full_rank",
    "commutator_max_rank",
    "construct_commutator_witness",
    "effective_rank_stats",
    "eig_multiplicity_ok",
    "estimate_diversity_slope",
    "PointResult",
    "SimConfig",
    "SweepResult",
    "read_csv",
    "run_sweep",
    "write_csv",
]
