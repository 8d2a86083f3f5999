"""One-step ADER discontinuous Galerkin schemes with a posteriori subcell
finite-volume limiting for the compressible Euler equations on 1D and 2D
Cartesian grids."""
from .basis import assemble_operator_tables, build_nodal_basis, gauss_legendre
from .config import RunConfig, load_config
from .errors import ConfigError, InadmissibleStateError, NumericalFailure, PredictorFailure
from .scenarios import error_norms, get_scenario, scenario_catalog, vortex_exact
from .riemann_exact import exact_riemann_1d
from .solver import Solver

__all__ = [
    "ConfigError", "InadmissibleStateError", "NumericalFailure", "PredictorFailure",
    "RunConfig", "Solver", "assemble_operator_tables", "build_nodal_basis", "error_norms",
    "exact_riemann_1d", "gauss_legendre", "get_scenario", "load_config", "scenario_catalog",
    "vortex_exact",
]
__version__ = "0.1.0"
