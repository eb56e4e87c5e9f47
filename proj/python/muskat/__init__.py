"""Python front end of the Muskat interface laboratory."""

from ._muskat import (
    ConfigError,
    GeometryError,
    InputError,
    MapValidityError,
    SolverError,
    __version__,
    check,
    dn_apply,
    flat_dn_multiplier,
    oracle,
    oracle_names,
    paralinearization_residual,
    parse_config,
    run,
    sha256_hex,
    solve_interface_potentials,
    step_one_phase,
)

__all__ = [
    "ConfigError",
    "GeometryError",
    "InputError",
    "MapValidityError",
    "SolverError",
    "__version__",
    "check",
    "dn_apply",
    "flat_dn_multiplier",
    "oracle",
    "oracle_names",
    "paralinearization_residual",
    "parse_config",
    "run",
    "sha256_hex",
    "solve_interface_potentials",
    "step_one_phase",
]
