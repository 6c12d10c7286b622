"""Discrete mollifiers, interior mollification, mollified gradients and commutators."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .grid import Field, Grid
from .systems import flux_names

PROFILE = "c2-bump"
_REL = 1e-12


@dataclass(frozen=True, eq=False)
class Kernel:
    """Discrete radial bump ``(1 - (r/eps)^2)^3`` on a subset of grid axes.

    ``offsets`` are integer lattice offsets ``s`` (one column per kernel axis)
    with ``|s| < eps`` in physical units; ``weights`` satisfy
    ``sum(weights) * cell_volume == 1``.
    """

    grid: Grid
    epsilon: float
    axes: tuple[int, ...]
    offsets: np.ndarray
    weights: np.ndarray
    profile: str = PROFILE

    @property
    def cell_volume(self) -> float:
        return float(np.prod([self.grid.spacings[a] for a in self.axes]))

    @property
    def halo(self) -> tuple[int, ...]:
        """Largest offset along each grid axis (zero on unmollified axes)."""
        out = [0] * self.grid.ndim
        for col, a in enumerate(self.axes):
            out[a] = int(np.max(np.abs(self.offsets[:, col])))
        return tuple(out)

    def physical_offsets(self) -> np.ndarray:
        h = np.array([self.grid.spacings[a] for a in self.axes])
        return self.offsets * h

    def moment2(self, axis: int) -> float:
        """Discrete second moment ``sum eta(s) s_a^2 vol`` along a grid axis."""
        col = self.axes.index(axis)
        s = self.physical_offsets()[:, col]
        return float(np.sum(self.weights * s * s) * self.cell_volume)

    def derivative_weights(self, axis: int) -> np.ndarray:
        """Sampled ``d eta / d s_axis``, rescaled so affine fields differentiate exactly."""
        col = self.axes.index(axis)
        s = self.physical_offsets()
        r2 = np.sum(s * s, axis=1) / self.epsilon ** 2
        dw = -6.0 * s[:, col] / self.epsilon ** 2 * (1.0 - r2) ** 2
        # first-moment correction: -sum dw * s_a * vol must equal 1
        first = -np.sum(dw * s[:, col]) * self.cell_volume
        return dw / first


def _resolve_axes(grid: Grid, axes) -> tuple[int, ...]:
    if axes is None or axes == "all":
        return tuple(range(grid.ndim))
    if axes == "space":
        return grid.spatial_axes
    axes = tuple(sorted(int(a) for a in axes))
    if not axes or any(a < 0 or a >= grid.ndim for a in axes):
        raise ValueError(f"invalid kernel axes {axes}")
    return axes


def mollifier_kernel(grid: Grid, epsilon: float, axes=None) -> Kernel:
    """Build the unit-mass mollifier at scale ``epsilon``.

    ``axes`` is ``None``/``"all"`` (space-time), ``"space"`` or explicit axis
    indices.  Requires ``epsilon >= 2 * max spacing`` on the chosen axes.
    """
    axes = _resolve_axes(grid, axes)
    h = np.array([grid.spacings[a] for a in axes])
    if not epsilon >= 2.0 * h.max() * (1 - _REL):
        raise ValueError(f"epsilon under-resolved: {epsilon:.6g} < 2 x spacing {h.max():.6g}")
    reach = [int(np.floor(epsilon / hh * (1 + _REL))) for hh in h]
    ranges = [np.arange(-m, m + 1) for m in reach]
    offs = np.stack([g.ravel() for g in np.meshgrid(*ranges, indexing="ij")], axis=1)
    r2 = np.sum((offs * h) ** 2, axis=1) / epsilon ** 2
    keep = r2 < 1.0
    offs, r2 = offs[keep], r2[keep]
    w = (1.0 - r2) ** 3
    vol = float(np.prod(h))
    w = w / (np.sum(w) * vol)
    return Kernel(grid, float(epsilon), axes, offs.astype(np.int64), w)


def interior_window(grid: Grid, epsilon: float, axes, halo=None) -> tuple[slice, ...]:
    """Index window of points whose ``epsilon``-ball stays inside the domain.

    Periodic axes and axes not being mollified are kept whole.
    """
    window = []
    for a in range(grid.ndim):
        n = grid.extents[a]
        if grid.periodic[a] or a not in axes:
            window.append(slice(0, n))
            continue
        h = grid.spacings[a]
        lo = int(np.ceil(epsilon / h * (1 - _REL) - 0.5))
        if halo is not None:
            lo = max(lo, halo[a])
        hi = n - lo
        if hi <= lo:
            raise ValueError(f"empty shrunk interior on axis {a} for epsilon={epsilon:.6g}")
        window.append(slice(lo, hi))
    return tuple(window)


def _convolve(values: np.ndarray, kernel: Kernel, weights: np.ndarray, window) -> np.ndarray:
    grid = kernel.grid
    halo = kernel.halo
    flat, base, strides = _kernels.pad_and_flatten(values, halo, grid.periodic)
    base = base.reshape(grid.shape)[window].ravel()
    full = np.zeros((kernel.offsets.shape[0], grid.ndim), dtype=np.int64)
    # eta_eps * U (x) = sum_s eta(s) U(x - s)
    full[:, list(kernel.axes)] = -kernel.offsets
    lin = _kernels.linear_offsets(full, strides)
    res = _kernels.stencil_sum(flat, base, lin, weights * kernel.cell_volume)
    out = np.zeros(values.shape)
    win_shape = tuple(s.stop - s.start for s in window)
    out[(slice(None),) + window] = res.reshape((values.shape[0],) + win_shape)
    return out


def _check(field: Field, kernel: Kernel):
    if field.grid != kernel.grid:
        raise ValueError("kernel was built for a different grid")
    return interior_window(field.grid, kernel.epsilon, kernel.axes, kernel.halo)


def mollify(field: Field, kernel: Kernel) -> Field:
    """``[U]_eps`` on the shrunk interior; the result's ``window`` marks valid points."""
    window = _check(field, kernel)
    vals = _convolve(field.values, kernel, kernel.weights, window)
    return Field(field.grid, vals, field.component_names, window)


def mollified_gradient(field: Field, kernel: Kernel) -> Field:
    """Derivatives of ``[U]_eps`` along every kernel axis, by kernel-derivative convolution.

    Components are ordered component-major: ``d_a U_c`` at index ``c * len(axes) + i``.
    """
    window = _check(field, kernel)
    parts = []
    for a in kernel.axes:
        parts.append(_convolve(field.values, kernel, kernel.derivative_weights(a), window))
    vals = np.stack(parts, axis=1).reshape((-1,) + field.grid.shape)
    names = tuple(f"d{a}_{c}" for c in field.component_names for a in kernel.axes)
    return Field(field.grid, vals, names, window)


def apply_on_window(fun, values: np.ndarray, window) -> np.ndarray:
    """Evaluate a pointwise map on the window only; zeros elsewhere."""
    sub = values[(slice(None),) + tuple(window)]
    res = np.asarray(fun(sub))
    out = np.zeros(res.shape[:res.ndim - sub.ndim + 1] + values.shape[1:])
    out[(Ellipsis,) + tuple(window)] = res
    return out


@dataclass(frozen=True, eq=False)
class MollifiedFluxes:
    """Intermediate products shared by the commutator and residual operators.

    Flux arrays have shape (m, k+1, *grid) with columns ``(A, F_1, ..., F_k)``.
    """

    mollified: Field
    G_of_mollified: np.ndarray
    mollified_G: np.ndarray
    window: tuple[slice, ...]

    @property
    def commutator(self) -> np.ndarray:
        return self.mollified_G - self.G_of_mollified


def mollified_fluxes(field: Field, system, kernel: Kernel) -> MollifiedFluxes:
    window = _check(field, kernel)
    if field.n_components != system.n:
        raise ValueError(f"{system.name} expects {system.n} components, field has {field.n_components}")
    system.check_domain(field.values)
    m, cols = system.n_eq, system.k + 1
    if system.k != field.grid.spatial_dims:
        raise ValueError(f"{system.name} has k={system.k} but the grid has "
                         f"{field.grid.spatial_dims} spatial dimensions")
    g = system.G(field.values).reshape((m * cols,) + field.grid.shape)
    mg = _convolve(g, kernel, kernel.weights, window).reshape((m, cols) + field.grid.shape)
    ub = mollify(field, kernel)
    gb = apply_on_window(system.G, ub.values, window)
    return MollifiedFluxes(ub, gb, mg, window)


def commutator(field: Field, system, kernel: Kernel) -> Field:
    """``[G(U)]_eps - G([U]_eps)`` on the shrunk interior, ``m * (k+1)`` components."""
    mf = mollified_fluxes(field, system, kernel)
    vals = mf.commutator.reshape((-1,) + field.grid.shape)
    return Field(field.grid, vals, flux_names(system, "G"), mf.window)
