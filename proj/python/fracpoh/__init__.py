"""Dirichlet problems for homogeneous integro-differential operators.

C++ core exposed through the `_fracpoh` extension: kernel normalization
constants, domains and grids, the discrete nonlocal operator, linear /
power / eigenvalue solvers, boundary-trace extraction, and Pohozaev
identity checks.
"""

from ._fracpoh import (  # noqa: F401
    Domain,
    Grid,
    GridFunction,
    Kernel,
    Operator,
    ParameterError,
    NumericalError,
    assemble,
    build_grid,
    critical_exponent,
    frac_constant,
    nonexistence_verdict,
    run_config,
    solve_eigen,
    solve_linear,
    solve_power,
    solve_torsion,
    torsion_constant,
    trace_quotient,
    verify_poh1,
    __version__,
)

__all__ = [
    "Domain",
    "Grid",
    "GridFunction",
    "Kernel",
    "Operator",
    "ParameterError",
    "NumericalError",
    "assemble",
    "build_grid",
    "critical_exponent",
    "frac_constant",
    "nonexistence_verdict",
    "run_config",
    "solve_eigen",
    "solve_linear",
    "solve_power",
    "solve_torsion",
    "torsion_constant",
    "trace_quotient",
    "verify_poh1",
    "__version__",
]
