"""Numerical analysis of u_t + |grad u| = 0 via the Hopf-Lax formula."""

from .characteristics import (
    TerminationRecord,
    characteristic_point,
    in_E,
    in_M,
    termination_times,
    termination_times_bisect,
    touching_time,
)
from .classify import PointClass, classify_point, classify_termination
from .conjugate import blowup_probe, det_Xy, direction_jacobian, hessian_transport
from .errors import (
    ConfigError,
    DegenerateGradient,
    EikonalError,
    InvalidDirection,
    NotApplicable,
    NotC2,
    OutOfBounds,
    SingularJacobian,
)
from .field import CATALOG, ScalarField, half_space_side, level_side, make_field
from .hopflax import (
    MinimizerSet,
    SpaceTimePoint,
    directional_derivative_u,
    evaluate_u,
    gradient_u,
    minimizer_set,
    reachable_gradients,
)
from .sigmap import GridSpec, label_components, scan_grid, smoothness_probe
from .tolerances import DEFAULT as DEFAULT_TOLERANCES, Tolerances

__version__ = "0.1.0"
