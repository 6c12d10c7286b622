"""Boundary shell integrals, the wall cutoff ``phi_eps`` and the global entropy balance."""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .grid import BoundaryGeometry, Field, Grid, boundary_geometry
from .mollify import Kernel, mollifier_kernel
from .residuals import dissipation_density

INNER, OUTER = 0.25, 0.5


def _geometry(grid: Grid, epsilon: float) -> BoundaryGeometry:
    geo = boundary_geometry(grid)
    if not 0 < epsilon < grid.epsilon0:
        raise ValueError(f"epsilon={epsilon:.6g} must lie in (0, {grid.epsilon0:.6g}) (half the "
                         "shortest bounded length)")
    return geo


@dataclass(frozen=True, eq=False)
class ShellSpec:
    """Points with ``eps/4 <= d(x, boundary) <= eps/2`` on the spatial grid."""

    grid: Grid
    epsilon: float
    geometry: BoundaryGeometry
    mask: np.ndarray

    @property
    def n_points(self) -> int:
        return int(self.mask.sum())


def shell(grid: Grid, epsilon: float) -> ShellSpec:
    geo = _geometry(grid, epsilon)
    tol = 1e-12 * epsilon
    d = geo.distance
    mask = (d >= INNER * epsilon - tol) & (d <= OUTER * epsilon + tol)
    if not mask.any():
        raise ValueError(f"empty shell: epsilon={epsilon:.6g} is under-resolved")
    return ShellSpec(grid, float(epsilon), geo, mask)


def _time_weights(grid: Grid, time_range) -> np.ndarray:
    """Quadrature weight per snapshot (a single unit weight without a time axis)."""
    if not grid.has_time:
        return np.ones(1)
    t = grid.coords(0)
    w = np.full(t.shape, grid.spacings[0])
    if time_range is not None:
        t0, t1 = time_range
        w = np.where((t >= t0) & (t <= t1), w, 0.0)
    return w


def _normal_flux(field: Field, system, geo: BoundaryGeometry) -> np.ndarray:
    """``q(U) . n(sigma(x))`` with a leading time axis (length 1 without time)."""
    system.check_domain(field.values)
    q = np.asarray(system.q(field.values))
    if not field.grid.has_time:
        q = q[:, None]
    return np.einsum("j...,j...->...", q, geo.normal[:, None])


def shell_integral(field: Field, system, spec: ShellSpec, time_range=None) -> float:
    """``(1/eps) * int_0^T int_shell |q(U) . n(sigma(x))| dx dt`` by Riemann sums.

    Without a time axis the field is taken as steady over a unit time span.
    """
    if spec.grid != field.grid.spatial_grid():
        raise ValueError("shell was built for a different spatial grid")
    qn = np.abs(_normal_flux(field, system, spec.geometry))
    per_time = np.sum(qn[:, spec.mask], axis=1) * field.grid.spatial_cell_volume
    return float(np.sum(per_time * _time_weights(field.grid, time_range)) / spec.epsilon)


def shell_sweep(field: Field, system, epsilons, time_range=None):
    from .besov import SweepReport

    sgrid = field.grid.spatial_grid()
    vals = [shell_integral(field, system, shell(sgrid, e), time_range) for e in epsilons]
    return SweepReport.from_values(list(epsilons), vals, "boundary shell")


def _profile(s):
    t = np.clip((s - INNER) / (OUTER - INNER), 0.0, 1.0)
    return t ** 3 * (10.0 - 15.0 * t + 6.0 * t * t)


def _profile_slope(s):
    t = np.clip((s - INNER) / (OUTER - INNER), 0.0, 1.0)
    return 30.0 * t * t * (1.0 - t) ** 2 / (OUTER - INNER)


@dataclass(frozen=True, eq=False)
class WallCutoff:
    """``phi(d/eps)`` on the spatial grid with gradient ``-(1/eps) phi'(d/eps) n(sigma(x))``."""

    grid: Grid
    epsilon: float
    values: np.ndarray
    gradient: np.ndarray

    @property
    def max_slope(self) -> float:
        """``max |grad phi_eps| * eps`` over the grid."""
        return float(np.max(np.sqrt(np.sum(self.gradient ** 2, axis=0))) * self.epsilon)


def boundary_test_function(grid: Grid, epsilon: float) -> WallCutoff:
    """Wall cutoff: 0 for ``d <= eps/4``, 1 for ``d >= eps/2``, quintic in between."""
    sgrid = grid.spatial_grid()
    geo = _geometry(sgrid, epsilon)
    s = geo.distance / epsilon
    grad = -(_profile_slope(s) / epsilon)[None] * geo.normal
    return WallCutoff(sgrid, float(epsilon), _profile(s), grad)


@dataclass(frozen=True)
class BalanceReport:
    """Per-snapshot terms of ``dE/dt + interior + shell = closure``.

    ``interior`` is ``-int phi_eps D_eps`` and ``shell`` is ``-int grad phi_eps . q``,
    so an exact weak solution has ``closure = 0``.
    """

    times: tuple[float, ...]
    energy: tuple[float, ...]
    dEdt: tuple[float, ...]
    interior: tuple[float, ...]
    shell: tuple[float, ...]
    closure: tuple[float, ...]

    def relative_closure(self) -> float:
        """``max |closure|`` over ``max`` term magnitude (0 when every term vanishes)."""
        scale = max(np.max(np.abs(self.dEdt)), np.max(np.abs(self.interior)), np.max(np.abs(self.shell)))
        worst = float(np.max(np.abs(self.closure)))
        return 0.0 if scale == 0 and worst == 0 else worst / scale if scale > 0 else float("inf")

    def closes(self, rel_tol: float = 0.05, abs_tol: float = 1e-12) -> bool:
        scale = max(np.max(np.abs(self.dEdt)), np.max(np.abs(self.interior)), np.max(np.abs(self.shell)))
        return bool(np.max(np.abs(self.closure)) <= max(rel_tol * scale, abs_tol))

    def to_json(self) -> str:
        return json.dumps({k: list(v) for k, v in self.__dict__.items()}, indent=2)


def global_balance(field: Field, system, epsilon: float, kernel: Kernel | None = None) -> BalanceReport:
    """Energy ledger of a space-time field against the wall cutoff at scale ``epsilon``.

    ``kernel`` must mollify space only (every registry system has an affine
    ``A``); its shrunk interior must contain the support of ``phi_eps``.  The
    default uses ``max(epsilon/8, 2 * spacing)``.
    """
    grid = field.grid
    if not grid.has_time:
        raise ValueError("global_balance needs a time axis")
    if grid.extents[0] < 3:
        raise ValueError("global_balance needs at least 3 snapshots")
    cut = boundary_test_function(grid, epsilon)
    if kernel is None:
        h = max(grid.spacings[a] for a in grid.spatial_axes)
        kernel = mollifier_kernel(grid, max(epsilon / 8.0, 2.0 * h), "space")
    if kernel.axes != grid.spatial_axes:
        raise ValueError("global_balance needs a space-only kernel")
    system.check_domain(field.values)
    vol = grid.spatial_cell_volume
    dt = grid.spacings[0]
    energy = np.sum(np.asarray(system.eta(field.values)).reshape(grid.extents[0], -1), axis=1) * vol
    dEdt = np.gradient(energy, dt, edge_order=2)

    dens = dissipation_density(field, system, kernel)
    covered = dens.mask[0]
    if np.any((cut.values > 0) & ~covered):
        raise ValueError("kernel epsilon too large: the dissipation window misses part of the "
                         "wall cutoff's support")
    interior = -np.sum((dens.values[0] * cut.values[None]).reshape(grid.extents[0], -1), axis=1) * vol
    q = np.asarray(system.q(field.values)).reshape(grid.spatial_dims, grid.extents[0], -1)
    shell_term = -np.einsum("jtx,jx->t", q, cut.gradient.reshape(grid.spatial_dims, -1)) * vol
    closure = dEdt + interior + shell_term
    return BalanceReport(*(tuple(float(x) for x in a) for a in
                           (grid.coords(0), energy, dEdt, interior, shell_term, closure)))


def nested_moduli(field: Field, epsilon: float, margins, axes="space") -> list[tuple[float, float]]:
    """``vmo_modulus`` on interior boxes ``{d >= margin}`` for each margin.

    Reports how the modulus behaves toward the wall without asserting a rate.
    """
    from .besov import vmo_modulus
    from .grid import broadcast_spatial

    geo = boundary_geometry(field.grid)
    out = []
    for m in margins:
        region = broadcast_spatial(field.grid, geo.distance >= m)
        out.append((float(m), vmo_modulus(field, region, epsilon, axes)))
    return out
