from .attenuators import (
    DEFAULT_Z0,
    ActiveLoads,
    AttenuatorError,
    CurrentProfile,
    FixedLoad,
    InvalidAttenuationError,
    LineKind,
    LineSpec,
    LoadScale,
    NoTargetCurrentError,
    TPad,
    back_propagate_current,
    dbm_to_watts,
    line_active_loads,
    pump_rms_current,
    segment_resistance,
    synthesize_tpad,
    twpa_pump_loads,
    watts_to_dbm,
)

__all__ = [
    "DEFAULT_Z0",
    "ActiveLoads",
    "AttenuatorError",
    "CurrentProfile",
    "FixedLoad",
    "InvalidAttenuationError",
    "LineKind",
    "LineSpec",
    "LoadScale",
    "NoTargetCurrentError",
    "TPad",
    "back_propagate_current",
    "dbm_to_watts",
    "line_active_loads",
    "pump_rms_current",
    "segment_resistance",
    "synthesize_tpad",
    "twpa_pump_loads",
    "watts_to_dbm",
]
