from .cli import EXIT_BUDGET, EXIT_CAPACITY, EXIT_ERROR, EXIT_OK, create_parser, main, parse_sweep
from .config import CONFIG_ENV_VAR, ConfigError, RunConfig, find_config, load_config

__all__ = [
    "CONFIG_ENV_VAR",
    "EXIT_BUDGET",
    "EXIT_CAPACITY",
    "EXIT_ERROR",
    "EXIT_OK",
    "ConfigError",
    "RunConfig",
    "create_parser",
    "find_config",
    "load_config",
    "main",
    "parse_sweep",
]
