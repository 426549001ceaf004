"""ENO reconstruction, its stability properties, and finite-volume solvers built on it."""

from enolab.divdiff import DividedDifferenceTable, build_table, newton_table, table_equals_primitive_oracle
from enolab.eno import (
    CellPolynomial,
    InterfaceTrace,
    Reconstruction,
    StencilSelection,
    eno_batch,
    eno_limiter,
    jump_formula,
    limiter_form,
    reconstruct,
    select_stencils,
)
from enolab.errors import EnoLabError
from enolab.fvm import (
    FluxLaw,
    SchemeConfig,
    burgers,
    diagnostics,
    entropy_residual,
    linear_advection,
    monotone_flux,
    semi_discrete_rhs,
    solve,
    step,
    tecno_flux,
)
from enolab.mesh import GridFunction, Mesh, build_uniform_mesh, primitive_trace, sample_averages, sample_points
from enolab.stability import (
    UPPER_BOUNDS,
    PropertyReport,
    check_eno_tv,
    check_shock_monotonicity,
    check_sign_property,
    check_sweby,
    check_upper_bound,
    conjecture_chain_k2,
    conjecture_probe,
    worst_case,
)

__version__ = "0.1.0"
