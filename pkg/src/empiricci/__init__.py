"""Kernel estimators of Bakry-Émery operators and coarse Ricci curvature on point clouds."""

from .bounds import (
    BoundParams,
    FunctionClass,
    ambient_covering_bound,
    gc_bound,
    greedy_epsilon_net,
    hoeffding_bound,
    q_t,
    required_n,
    universal_c0,
)
from .estimators import CarreDuChamp, CoarseRicci, IteratedCarreDuChamp, TLaplacian, ThetaDensity
from .fields import (
    Constant,
    Coordinate,
    PolarizedDistance,
    Product,
    SquaredDistanceTo,
    Tabulated,
    UnitPolarizedDistance,
    parse_field,
)
from .kernels import (
    SparseKernelWarning,
    density_ratio,
    effective_count,
    gamma2_hat,
    gamma2_hat_direct,
    gamma_hat,
    l_t_alpha_hat,
    l_t_hat,
    theta_alpha_hat,
    theta_hat,
)
from .pointcloud import (
    Circle,
    CliffordTorus,
    PointCloud,
    PointCloudFormatError,
    Sphere,
    load_csv,
    parse_spec,
    quadrature_grid,
    sample_uniform,
    sample_weighted_circle,
    save_csv,
)
from .ricci import (
    LimitSchedule,
    ScheduleConfig,
    empirical_coarse_ricci,
    empirical_life_sized,
    ricci_limit_estimate,
    schedule_t,
)
from .validation import BandwidthError

__version__ = "0.1.0"
