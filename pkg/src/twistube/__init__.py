"""Effective quantum dynamics in twisted tubes with slowly deformed
cross sections: geometry, transverse modes, two-level Hamiltonians,
spectral/ODE/WKB solvers, and quantum-geometric diagnostics."""

from .geometry import (
    CoordinateBreakdownError,
    Frame,
    FrameUndefinedError,
    GeometryError,
    HelixCurve,
    MetricEvaluation,
    SingularTransformError,
    TabulatedCurve,
    TransformProfile,
    embed_point,
    frenet_frame,
    gauge_divergence,
    metric_tensor,
    metric_tensor_fd,
)
from .transverse import (
    TransverseMode,
    angular_expectation,
    angular_expectation_quadrature,
    bessel_j,
    bessel_zero,
    box_energy,
    circular_mode,
    square_mode,
)
from .effective import (
    EffectiveHamiltonian,
    assemble_combined,
    assemble_rotation_circular,
    assemble_rotation_square,
    assemble_scaling_circular,
    assemble_scaling_square,
    assemble_shearing,
    geometric_potential,
    shear_splitting_coefficient,
    vt_diagnostic,
)
from .dynamics import (
    CrossSectionField,
    DegeneratePointError,
    DynamicsError,
    FieldScan,
    Grid1D,
    ResolutionError,
    TurningPointError,
    TwoLevelField,
    WKBSample,
    branch_momentum,
    discretize,
    eigensolve,
    eigensolve_near,
    flux_invariant,
    phase_evolution_scan,
    propagate,
    reconstruct_field,
    wkb_momenta,
    wkb_spinors,
)
from .qgt import (
    DegeneracyError,
    QGTError,
    QGTPoint,
    berry_loop,
    mixing_angle,
    qgt_analytic,
    qgt_fd_oracle,
)
from .config import ConfigError, RunConfig, parse_config, parse_config_dict

__version__ = "0.1.0"
