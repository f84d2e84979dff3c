"""Simulation and constraint-enforcing feedback on product Lie groups.

Thin wrapper over the compiled extension. The heavy lifting (geometry,
integration, feedback synthesis) lives in the C++ core; this package keeps
the Python surface to plain dicts and lists.
"""

from ._liedyn import (
    ConfigError,
    control_input,
    scenario_names,
    scenario_parameters,
    simulate,
    verify,
    version,
)

__version__ = "0.1.0"

__all__ = [
    "ConfigError",
    "control_input",
    "scenario_names",
    "scenario_parameters",
    "simulate",
    "verify",
    "version",
]
