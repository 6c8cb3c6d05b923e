from .budget import (
    DEFAULT_MULTIPLEX,
    DEFAULT_PRACTICAL_QUBIT_LIMIT,
    DEFAULT_READOUT_CHAIN_LIMIT,
    FLUX_BIAS_CURRENT,
    LNA_POWER,
    BudgetError,
    BudgetReport,
    CapacityExceededError,
    LineCounts,
    ProcessorModel,
    StageBudget,
    default_fixed_loads,
    default_line_templates,
    processor_line_counts,
    static_only_budget,
    sweep_sizes,
    system_budget,
)

__all__ = [
    "DEFAULT_MULTIPLEX",
    "DEFAULT_PRACTICAL_QUBIT_LIMIT",
    "DEFAULT_READOUT_CHAIN_LIMIT",
    "FLUX_BIAS_CURRENT",
    "LNA_POWER",
    "BudgetError",
    "BudgetReport",
    "CapacityExceededError",
    "LineCounts",
    "ProcessorModel",
    "StageBudget",
    "default_fixed_loads",
    "default_line_templates",
    "processor_line_counts",
    "static_only_budget",
    "sweep_sizes",
    "system_budget",
]
