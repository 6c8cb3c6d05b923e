from .cables import (
    MM2,
    CableError,
    CableLayer,
    CableSpec,
    StaticMode,
    cable_static_load,
    layer_static_load,
    layer_static_loads,
    sc_086_50_scn_cn,
    stage_net_static,
)

__all__ = [
    "MM2",
    "CableError",
    "CableLayer",
    "CableSpec",
    "StaticMode",
    "cable_static_load",
    "layer_static_load",
    "layer_static_loads",
    "sc_086_50_scn_cn",
    "stage_net_static",
]
