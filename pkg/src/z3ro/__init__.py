"""MRT and Z3RO precoding for large arrays with nonlinear power amplifiers."""

from .channels import ChannelRealization, iid_rayleigh_channel, los_ula_channel
from .core import (
    ArrayGeometry,
    LinkBudget,
    PrecoderWeights,
    SeededRng,
    db_from_linear,
    gaussian_symbols,
    linear_from_db,
)
from .metrics import (
    MetricsReport,
    SweepRow,
    backoff_sweep,
    bussgang_monte_carlo,
    third_order_analytic_metrics,
)
from .oracle import (
    ConjectureReport,
    RealProblemSolution,
    probe_realness_conjecture,
    solve_real_problem,
    theorem1_candidate,
    verify_critical_point,
)
from .pa import IdealPa, RappPa, ThirdOrderPa, parse_pa, third_order_split
from .precoding import (
    MrtPrecoder,
    ReceivedSample,
    Z3roPrecoder,
    mrt_weights,
    received_signal,
    snr_mrt,
    z3ro_los_weights,
    z3ro_snr,
    z3ro_weights,
    zero_distortion_residual,
)
from .radiation import (
    AngularGrid,
    PatternResult,
    directivity,
    radiation_pattern,
    total_distortion_power,
)

__version__ = "0.1.0"

__all__ = [
    "ArrayGeometry",
    "LinkBudget",
    "PrecoderWeights",
    "SeededRng",
    "db_from_linear",
    "linear_from_db",
    "gaussian_symbols",
    "ChannelRealization",
    "los_ula_channel",
    "iid_rayleigh_channel",
    "IdealPa",
    "ThirdOrderPa",
    "RappPa",
    "parse_pa",
    "third_order_split",
    "MrtPrecoder",
    "Z3roPrecoder",
    "mrt_weights",
    "z3ro_weights",
    "z3ro_los_weights",
    "zero_distortion_residual",
    "snr_mrt",
    "z3ro_snr",
    "received_signal",
    "ReceivedSample",
    "AngularGrid",
    "PatternResult",
    "radiation_pattern",
    "directivity",
    "total_distortion_power",
    "MetricsReport",
    "SweepRow",
    "bussgang_monte_carlo",
    "third_order_analytic_metrics",
    "backoff_sweep",
    "RealProblemSolution",
    "ConjectureReport",
    "theorem1_candidate",
    "solve_real_problem",
    "verify_critical_point",
    "probe_realness_conjecture",
]
