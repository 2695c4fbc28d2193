"""UsWB: multi-scale simulator of ultrasonic intra-body networks.

The heavy lifting lives in the C++ extension `uswb._core`; this package
re-exports its public surface.
"""

from ._core import (  # noqa: F401
    BerEstimate,
    ChannelImpulseResponse,
    ChannelTap,
    DelayStats,
    EnergyMetrics,
    HoppingPlan,
    MediumParams,
    Metrics,
    PhyParams,
    Scheme,
    attenuation_coefficient,
    build_ber_table_csv,
    calibrate_decay_constant,
    default_tissues,
    delay_stats,
    derive_hopping_plan,
    energy_metrics,
    estimate_ber,
    extract_impulse_response,
    max_frequency_for_budget,
    max_safe_pressure,
    modulate,
    path_gain,
    pressure_ratio,
    rate_bps,
    simulate_arm_field,
    simulate_scenario,
    sinr,
    solve_implicit_sinr,
    synth_impulse_response,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
