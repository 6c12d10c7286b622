"""Weak-form residuals, the localized companion-law residual and the dissipation density.

Flux arrays use the layout ``(rows, k+1, *grid)`` with columns ``(A, F_1..F_k)``.
On a space-time grid column ``c`` pairs with grid axis ``c``; on a space-only
grid the ``A`` column is dropped and ``F_j`` pairs with spatial axis ``j-1``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .besov import SweepReport
from .grid import Field, Grid, array_lp_norm, central_difference, region_mask
from .mollify import Kernel, apply_on_window, mollified_fluxes, mollifier_kernel


def _pairs(grid: Grid) -> list[tuple[int, int]]:
    """(flux column, grid axis) pairs that enter a divergence."""
    if grid.has_time:
        return [(c, c) for c in range(grid.ndim)]
    return [(c, c - 1) for c in range(1, grid.ndim + 1)]


def _smoothstep(t):
    t = np.clip(t, 0.0, 1.0)
    return t ** 3 * (10.0 - 15.0 * t + 6.0 * t * t)


@dataclass(frozen=True, eq=False)
class TestFunction:
    """Scalar test function ``psi`` sampled on a grid with its gradient.

    ``gradient[a]`` is the centred difference of ``values`` along axis ``a``;
    using the same stencil as the residual operators makes discrete summation
    by parts exact.  ``support`` holds one index range per axis.
    """

    __test__ = False  # keep pytest from collecting this class

    grid: Grid
    values: np.ndarray
    gradient: np.ndarray
    support: tuple[tuple[int, int], ...]
    support_margin: float

    def c1_norm(self) -> float:
        return float(np.max(np.abs(self.values)) + np.max(np.sqrt(np.sum(self.gradient ** 2, axis=0))))


def _gradient(grid: Grid, values: np.ndarray) -> np.ndarray:
    return np.stack([central_difference(values, a, grid.spacings[a], grid.periodic[a])
                     for a in range(grid.ndim)])


def bump_test_function(grid: Grid, support=None, periodic_constant: bool = False) -> TestFunction:
    """Tensor product of quintic bumps ``S(1 - |xi|)``, ``S(t) = 6t^5 - 15t^4 + 10t^3``.

    ``support`` gives ``(lo, hi)`` fractions of each axis length; the default is
    the middle half of every axis.  With ``periodic_constant`` the factor on
    periodic axes is 1, so on a fully periodic grid ``psi == 1``.
    """
    if support is None:
        support = [(0.25, 0.75)] * grid.ndim
    if len(support) != grid.ndim:
        raise ValueError(f"support needs {grid.ndim} (lo, hi) pairs")
    psi = np.ones(grid.shape)
    idx_support = []
    margin = np.inf
    for a, (lo, hi) in enumerate(support):
        n = grid.extents[a]
        if periodic_constant and grid.periodic[a]:
            idx_support.append((0, n))
            continue
        if not 0.0 <= lo < hi <= 1.0:
            raise ValueError(f"support fractions on axis {a} must satisfy 0 <= lo < hi <= 1")
        length = grid.lengths[a]
        x = grid.coords(a)
        centre, half = 0.5 * (lo + hi) * length, 0.5 * (hi - lo) * length
        prof = _smoothstep(1.0 - np.abs(x - centre) / half)
        nz = np.nonzero(prof)[0]
        if nz.size == 0:
            raise ValueError(f"support on axis {a} holds no grid point")
        # one extra cell each side carries the centred-difference gradient
        i0, i1 = max(int(nz[0]) - 1, 0), min(int(nz[-1]) + 2, n)
        idx_support.append((i0, i1))
        if not grid.periodic[a]:
            margin = min(margin, i0 * grid.spacings[a], (n - i1) * grid.spacings[a])
        shape = [1] * grid.ndim
        shape[a] = n
        psi = psi * prof.reshape(shape)
    return TestFunction(grid, psi, _gradient(grid, psi), tuple(idx_support), float(margin))


def torus_test_function(grid: Grid) -> TestFunction:
    """``psi == 1`` on a fully periodic grid (no localisation needed)."""
    if not all(grid.periodic):
        raise ValueError("psi == 1 is only admissible on a fully periodic grid")
    return bump_test_function(grid, periodic_constant=True)


def _check_support(psi: TestFunction, grid: Grid, window=None) -> None:
    if psi.grid != grid:
        raise ValueError("test function was built for a different grid")
    if not psi.support_margin > 0:
        raise ValueError("test-function support touches the boundary")
    if window is None:
        return
    for a, ((i0, i1), w) in enumerate(zip(psi.support, window)):
        if grid.periodic[a]:
            continue
        if i0 < w.start + 1 or i1 > w.stop - 1:
            raise ValueError(f"test-function support leaves the shrunk interior on axis {a}; "
                             "use a smaller epsilon or a narrower support")


def weak_residual(field: Field, system, psi: TestFunction) -> np.ndarray:
    """Per-row ``sum vol * (dpsi/dt A(U) + grad psi . F(U))``.

    Zero for exact weak solutions; compare against :func:`tol_weak`.
    """
    _check_support(psi, field.grid)
    system.check_domain(field.values)
    g = system.G(field.values)
    out = np.zeros(system.n_eq)
    for c, a in _pairs(field.grid):
        out += np.sum(g[:, c] * psi.gradient[a], axis=tuple(range(1, field.grid.ndim + 1)))
    return out * field.grid.cell_volume


def tol_weak(field: Field, system, psi: TestFunction) -> float:
    """Acceptance line ``10 * dx * ||G(U)||_{L1} * ||psi||_{C1}`` for a discrete weak solution."""
    g = system.G(field.values)
    cols = [c for c, _ in _pairs(field.grid)]
    g = g[:, cols].reshape((-1,) + field.grid.shape)
    l1 = array_lp_norm(g, 1.0, field.grid.cell_volume)
    return 10.0 * max(field.grid.spacings) * l1 * psi.c1_norm()


def is_weak_solution(field: Field, system, psi: TestFunction) -> bool:
    return bool(np.max(np.abs(weak_residual(field, system, psi))) <= tol_weak(field, system, psi))


@dataclass(frozen=True)
class CompanionReport:
    """Terms of the localized companion-law identity at one scale.

    ``value``: ``sum (G([U]) - [G(U)]) : D(B([U]) psi)``.
    ``defect``: ``sum [G(U)] : D(B([U]) psi)``, zero for exact weak solutions.
    ``majorant``: Holder bound ``||commutator||_{3/2} * ||D(B psi)||_3`` on ``value``.
    ``q_pairing``: ``sum Q([U]) . D psi``; equals ``value + defect`` up to the
    discrete chain-rule error.
    """

    epsilon: float
    value: float
    defect: float
    majorant: float
    q_pairing: float

    def as_dict(self) -> dict:
        return dict(self.__dict__)


def _multiplier_test(system, ub: np.ndarray, psi: TestFunction, window, grid: Grid) -> np.ndarray:
    """Centred derivatives of ``B([U]) psi``, shape ``(rows, ndim, *grid)``."""
    bpsi = apply_on_window(system.B, ub, window) * psi.values
    return np.stack([central_difference(bpsi, a + 1, grid.spacings[a], grid.periodic[a])
                     for a in range(grid.ndim)], axis=1)


def companion_residual(field: Field, system, psi: TestFunction, kernel: Kernel) -> CompanionReport:
    """Localized companion-law residual at the kernel's scale (see :class:`CompanionReport`)."""
    grid = field.grid
    mf = mollified_fluxes(field, system, kernel)
    _check_support(psi, grid, mf.window)
    pairs = _pairs(grid)
    cols = [c for c, _ in pairs]
    axes = [a for _, a in pairs]
    dbpsi = _multiplier_test(system, mf.mollified.values, psi, mf.window, grid)[:, axes]
    comm = mf.commutator[:, cols]
    vol = grid.cell_volume
    value = -float(np.sum(comm * dbpsi)) * vol
    defect = float(np.sum(mf.mollified_G[:, cols] * dbpsi)) * vol
    mask = np.zeros(grid.shape, dtype=bool)
    mask[mf.window] = True
    flat = (-1,) + grid.shape
    majorant = (array_lp_norm(comm.reshape(flat), 1.5, vol, mask)
                * array_lp_norm(dbpsi.reshape(flat), 3.0, vol, mask))
    ub = mf.mollified.values
    qcols = [apply_on_window(system.eta, ub, mf.window)] if grid.has_time else []
    qcols += list(apply_on_window(system.q, ub, mf.window))
    q_pairing = float(sum(np.sum(qc * psi.gradient[a]) for qc, a in zip(qcols, axes))) * vol
    return CompanionReport(kernel.epsilon, value, defect, float(majorant), q_pairing)


def dissipation_density(field: Field, system, kernel: Kernel) -> Field:
    """``B([U]) . div(G([U]) - [G(U)])`` on the shrunk interior, by centred differences.

    For a weak solution this is the entropy production ``div Q([U])``; it is
    negative where entropy is dissipated.  The result's window is the
    mollification window shrunk by one cell on mollified bounded axes.
    """
    grid = field.grid
    mf = mollified_fluxes(field, system, kernel)
    diff = -mf.commutator
    div = np.zeros((system.n_eq,) + grid.shape)
    for c, a in _pairs(grid):
        div += central_difference(diff[:, c], a + 1, grid.spacings[a], grid.periodic[a])
    b = apply_on_window(system.B, mf.mollified.values, mf.window)
    dens = np.sum(b * div, axis=0)
    window = []
    for a, w in enumerate(mf.window):
        if not grid.periodic[a] and a in kernel.axes:
            w = slice(w.start + 1, w.stop - 1)
            if w.stop <= w.start:
                raise ValueError("shrunk interior too thin for a centred divergence")
        window.append(w)
    window = tuple(window)
    out = np.zeros(grid.shape)
    out[window] = dens[window]
    return Field(grid, out[None], ("dissipation",), window)


def integrate(field: Field, region=None, per_unit_time: bool = False) -> float:
    """Riemann sum of a scalar field over ``region`` intersected with its window.

    ``per_unit_time`` divides by the time span covered by the time axis.
    """
    mask = region_mask(field.grid, region) & field.mask
    total = float(np.sum(field.values[0][mask])) * field.grid.cell_volume
    if per_unit_time:
        if not field.grid.has_time:
            raise ValueError("per_unit_time needs a time axis")
        total /= field.grid.lengths[0]
    return total


def epsilon_sweep_residual(field: Field, system, psi: TestFunction, epsilons, axes=None,
                           quantity: str = "value", label: str = "") -> SweepReport:
    """``|companion residual|`` (or ``majorant``/``defect``) over an epsilon sweep."""
    if quantity not in ("value", "majorant", "defect"):
        raise ValueError(f"unknown quantity {quantity!r}")
    vals = []
    for e in epsilons:
        rep = companion_residual(field, system, psi, mollifier_kernel(field.grid, e, axes))
        vals.append(abs(getattr(rep, quantity)))
    return SweepReport.from_values(list(epsilons), vals, label)
