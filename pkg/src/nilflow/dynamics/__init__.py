"""Momentum-space geodesic flows, orbit reduction, group lift and chaos diagnostics."""

from .chaos import EscapeError, LyapunovResult, PoincareSection, lyapunov_max, poincare_section
from .chart import (
    NonGenericPointError,
    OrbitChart,
    chart_to_dual,
    from_yang_mills,
    full_vector_field,
    reduce_to_orbit,
    reduced_hamiltonian,
    reduced_vector_field,
    scale_check,
    to_yang_mills,
    ym_form,
    ym_scale,
    ym_unscale,
)
from .group import GroupElement, GroupPath, exp_horizontal, reconstruct_group, shoot_endpoint
from .integrate import (
    DynamicsError,
    IntegratorConfig,
    NewtonConvergenceError,
    Trajectory,
    integrate,
    step,
)
from .systems import (
    System,
    full_system,
    heisenberg_reduced_system,
    reduced_system,
    sample_energy_shell,
    yang_mills_system,
)

__all__ = [
    "DynamicsError",
    "EscapeError",
    "GroupElement",
    "GroupPath",
    "IntegratorConfig",
    "LyapunovResult",
    "NewtonConvergenceError",
    "NonGenericPointError",
    "OrbitChart",
    "PoincareSection",
    "System",
    "Trajectory",
    "chart_to_dual",
    "exp_horizontal",
    "from_yang_mills",
    "full_system",
    "full_vector_field",
    "heisenberg_reduced_system",
    "integrate",
    "lyapunov_max",
    "poincare_section",
    "reconstruct_group",
    "reduce_to_orbit",
    "reduced_hamiltonian",
    "reduced_system",
    "reduced_vector_field",
    "sample_energy_shell",
    "scale_check",
    "shoot_endpoint",
    "step",
    "to_yang_mills",
    "ym_form",
    "ym_scale",
    "ym_unscale",
    "yang_mills_system",
]
