"""Entropy-conservation diagnostics for sampled solutions of conservation laws."""

from .besov import (SweepReport, directional_modulus, exponent_condition_check, scaling_fit,
                    structure_function, vmo_modulus, vmo_sweep)
from .boundary import BalanceReport, ShellSpec, boundary_test_function, global_balance, shell, shell_integral
from .grid import Field, Grid, boundary_geometry, lp_norm, make_grid
from .mollify import Kernel, commutator, mollified_gradient, mollifier_kernel
from .residuals import (TestFunction, bump_test_function, companion_residual, dissipation_density,
                        epsilon_sweep_residual, tol_weak, torus_test_function, weak_residual)
from .synth import burgers_shock, holder_field, manufactured_state, shear_flow
from .systems import PolytropicPressure, SystemSpec, check_compatibility, evaluate, register_system

__all__ = [
    "BalanceReport", "Field", "Grid", "Kernel", "PolytropicPressure", "ShellSpec", "SweepReport",
    "SystemSpec", "TestFunction", "boundary_geometry", "boundary_test_function", "bump_test_function",
    "burgers_shock", "check_compatibility", "commutator", "companion_residual", "directional_modulus",
    "dissipation_density", "epsilon_sweep_residual", "evaluate", "exponent_condition_check",
    "global_balance", "holder_field", "lp_norm", "make_grid", "manufactured_state", "mollified_gradient",
    "mollifier_kernel", "register_system", "scaling_fit", "shear_flow", "shell",
    "shell_integral", "structure_function", "tol_weak", "torus_test_function", "vmo_modulus",
    "vmo_sweep", "weak_residual",
]
