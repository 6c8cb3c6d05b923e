from .fridge import (
    DEFAULT_LINE_CAPACITY,
    PROCESSOR_ID,
    FridgeError,
    FridgeModel,
    Segment,
    Stage,
    UnknownStageError,
    xld1000_sl,
)

__all__ = [
    "DEFAULT_LINE_CAPACITY",
    "PROCESSOR_ID",
    "FridgeError",
    "FridgeModel",
    "Segment",
    "Stage",
    "UnknownStageError",
    "xld1000_sl",
]
