"""Line-search minimization of orthogonally invariant energies on the
Stiefel/Grassmann manifold, with an adaptive (estimate/judge/improve)
step-size strategy alongside non-monotone Armijo backtracking."""

from .linalg import (
    ConvergenceFailure,
    LinalgError,
    RankDeficient,
    ShapeMismatch,
    svd_thin,
    sym_eig,
    thin_qr,
)
from .manifold import (
    PrincipalAngles,
    StiefelPoint,
    TangentVector,
    connecting_direction,
    dist_cf,
    dist_geo,
    parallel_transport,
    principal_angles,
    project_tangent,
    retract_geodesic,
    retract_qr,
)
from .objectives import (
    EnergyModel,
    NonlinearLatticeModel,
    QuadraticTraceModel,
    eigen_oracle,
    grassmann_gradient,
    grassmann_hessian_qform,
    harmonic_lattice,
    load_matrix,
    random_symmetric,
)
from .search import (
    IterationRecord,
    SolveConfig,
    SolveResult,
    Status,
    cg_direction,
    solve,
    steepest_direction,
)
from .stepsize import (
    DegenerateDenominator,
    MaxBacktracks,
    NonDescentDirection,
    NonMonotoneState,
    StepDecision,
    StepParams,
    acceptable_upper_bound,
    adaptive_step,
    backtracking_step,
    bb_initial,
    bb_step_1,
    bb_step_2,
    estimator_zeta,
    improve_step,
    initial_nm_state,
    nm_update,
)

__version__ = "0.1.0"
