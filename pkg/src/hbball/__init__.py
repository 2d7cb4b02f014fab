"""Numerical tools for de Branges-Rovnyak spaces H(b) on the unit ball of C^n."""

from .geometry import (
    ApproachRegion,
    BallPoint,
    Curve,
    SphereGrid,
    SpherePoint,
    hermitian_inner,
    in_admissible_region,
    restricted_curve_check,
    sphere_grid,
    unit_vector,
)
from .kernels import hb_kernel, hb_kernel_norm, invariant_poisson, szego
from .symbols import (
    Symbol,
    affine_half,
    coordinate_slice,
    disc_lift,
    monomial,
    sup_norm_estimate,
    symbol_from_config,
    taylor_coefficients,
    theta,
)
from .hbspace import (
    CandidateFunction,
    PointConfiguration,
    gram_matrix,
    hb_inner_product,
    membership_estimate,
    min_norm_interpolant_norm,
    nested_radial_configs,
    reproducing_check,
    sup_def_norm_estimate,
)
from .clark import (
    ClarkParameter,
    DiscreteMeasure,
    absolute_continuity_check,
    atom_mass_upper_bound,
    clark_inner_identity_check,
    clark_problem,
    poisson_rhs,
    poisson_transform,
    solve_clark,
    vb_transform,
)
from .angular import (
    admissible_limit,
    angular_derivative_estimate,
    boundary_quotients,
    equivalence_harness,
    essential_norm_lower_bound,
    julia_inequality_check,
)

__version__ = "0.1.0"
