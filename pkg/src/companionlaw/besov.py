"""Third-order structure functions, the Besov-VMO modulus and scaling fits."""

from __future__ import annotations

import csv
import io
import json
import math
import warnings
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .grid import Field, Grid, region_mask

_REL = 1e-12


@dataclass(frozen=True)
class SweepReport:
    """A series of ``(epsilon, value)`` samples with its log-log fit.

    ``fitted_exponent`` and ``fit_quality`` are ``None`` when fewer than four
    positive values were available.
    """

    epsilons: tuple[float, ...]
    values: tuple[float, ...]
    fitted_exponent: float | None
    fit_quality: float | None
    region_label: str = ""

    def __post_init__(self):
        if len(self.epsilons) != len(self.values):
            raise ValueError("epsilons and values differ in length")
        if any(b >= a for a, b in zip(self.epsilons, self.epsilons[1:])):
            raise ValueError("epsilons must be strictly decreasing")
        if any(v < 0 for v in self.values):
            raise ValueError("values must be nonnegative")

    @classmethod
    def from_values(cls, epsilons, values, region_label: str = "") -> "SweepReport":
        order = np.argsort(-np.asarray(epsilons, dtype=float))
        eps = tuple(float(epsilons[i]) for i in order)
        vals = tuple(float(values[i]) for i in order)
        exponent = quality = None
        if sum(v > 0 for v in vals) >= 4:
            exponent, quality = scaling_fit(eps, vals)
        else:
            warnings.warn("fewer than 4 positive values: scaling fit skipped", stacklevel=2)
        return cls(eps, vals, exponent, quality, region_label)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["epsilon", "value"])
        for e, v in zip(self.epsilons, self.values):
            w.writerow([repr(e), repr(v)])
        return buf.getvalue()

    def to_json(self) -> str:
        return json.dumps({
            "epsilons": list(self.epsilons),
            "values": list(self.values),
            "exponent": self.fitted_exponent,
            "r2": self.fit_quality,
            "region_label": self.region_label,
        }, indent=2)

    @classmethod
    def from_csv(cls, text: str, region_label: str = "") -> "SweepReport":
        rows = list(csv.reader(io.StringIO(text)))
        if not rows or [c.strip() for c in rows[0]] != ["epsilon", "value"]:
            raise ValueError("sweep CSV must start with the header 'epsilon,value'")
        eps = [float(r[0]) for r in rows[1:] if r]
        vals = [float(r[1]) for r in rows[1:] if r]
        return cls.from_values(eps, vals, region_label)


def scaling_fit(epsilons, values) -> tuple[float, float]:
    """Least-squares slope of ``log value`` against ``log epsilon`` and its R^2.

    Zero values are dropped with a warning; fewer than four positive points is
    an error.
    """
    eps = np.asarray(epsilons, dtype=float)
    vals = np.asarray(values, dtype=float)
    if eps.shape != vals.shape:
        raise ValueError("epsilons and values differ in length")
    positive = vals > 0
    if not positive.all():
        warnings.warn(f"dropping {int((~positive).sum())} non-positive value(s) from the fit",
                      stacklevel=2)
    if positive.sum() < 4:
        raise ValueError(f"need at least 4 positive points, got {int(positive.sum())}")
    x, y = np.log(eps[positive]), np.log(vals[positive])
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    ss_res = float(np.sum(resid ** 2))
    r2 = 1.0 if ss_tot <= 1e-30 * max(1.0, float(np.sum(y ** 2))) else max(0.0, 1.0 - ss_res / ss_tot)
    return float(slope), float(r2)


def default_epsilons(grid: Grid, axes=None, top: float = 16.0, bottom: float = 4.0,
                     ratio: float = math.sqrt(2.0)) -> list[float]:
    """Geometric sweep from ``top`` to ``bottom`` times the largest relevant spacing."""
    axes = range(grid.ndim) if axes is None else axes
    h = max(grid.spacings[a] for a in axes)
    n = int(round(math.log(top / bottom) / math.log(ratio)))
    return [top * h / ratio ** i for i in range(n + 1)]


def ball_offsets(grid: Grid, epsilon: float, axes) -> np.ndarray:
    """Integer offsets with Euclidean length ``<= epsilon`` over the given axes (origin included)."""
    h = np.array([grid.spacings[a] for a in axes])
    reach = [int(np.floor(epsilon / hh * (1 + _REL))) for hh in h]
    ranges = [np.arange(-m, m + 1) for m in reach]
    offs = np.stack([g.ravel() for g in np.meshgrid(*ranges, indexing="ij")], axis=1)
    keep = np.sum((offs * h) ** 2, axis=1) <= epsilon ** 2 * (1 + _REL)
    return offs[keep].astype(np.int64)


def _resolve(grid, axes):
    if axes is None or axes == "all":
        return tuple(range(grid.ndim))
    if axes == "space":
        return grid.spatial_axes
    return tuple(sorted(axes))


def _admissible(grid: Grid, mask: np.ndarray, reach: list[int]) -> bool:
    """True when every masked point keeps ``reach`` cells to each bounded face."""
    idx = np.nonzero(mask)
    for a in range(grid.ndim):
        if grid.periodic[a] or reach[a] == 0:
            continue
        if idx[a].min() < reach[a] or idx[a].max() > grid.extents[a] - 1 - reach[a]:
            return False
    return True


def vmo_modulus(field: Field, region=None, epsilon: float = None, axes=None) -> float:
    """Besov-VMO modulus ``omega(eps)``.

    ``(1/eps) * sum_X vol * mean_{Y in B_eps(X)} |U(X) - U(Y)|^3`` over the
    region, with ``B_eps`` the discrete Euclidean ball (origin included) on the
    chosen axes (all axes by default, ``"space"`` for per-time-slice balls).
    """
    if epsilon is None or epsilon <= 0:
        raise ValueError("epsilon must be positive")
    grid = field.grid
    axes = _resolve(grid, axes)
    mask = region_mask(grid, region)
    if not mask.any():
        raise ValueError("empty region")
    offs = ball_offsets(grid, epsilon, axes)
    if offs.shape[0] < 2:
        raise ValueError(f"epsilon under-resolved: ball of radius {epsilon:.6g} holds no neighbour")
    reach = [0] * grid.ndim
    for col, a in enumerate(axes):
        reach[a] = int(np.max(np.abs(offs[:, col])))
    if not _admissible(grid, mask, reach):
        raise ValueError("region comes within epsilon of the boundary")
    flat, base, strides = _kernels.pad_and_flatten(field.values, reach, grid.periodic)
    full = np.zeros((offs.shape[0], grid.ndim), dtype=np.int64)
    full[:, list(axes)] = offs
    lin = _kernels.linear_offsets(full, strides)
    per_point = _kernels.cubed_increments(flat, base[mask.ravel()], lin)
    return float(np.sum(per_point) / offs.shape[0] * grid.cell_volume / epsilon)


def directional_modulus(field: Field, shift) -> float:
    """``(1/|Z|) * sum_X vol * |U(X) - U(X+Z)|^3`` for a lattice shift ``Z``.

    Periodic axes wrap; on bounded axes only points with ``X+Z`` inside count.
    """
    grid = field.grid
    shift = tuple(int(s) for s in shift)
    if len(shift) != grid.ndim:
        raise ValueError(f"shift needs {grid.ndim} entries")
    length = math.sqrt(sum((s * h) ** 2 for s, h in zip(shift, grid.spacings)))
    if length == 0:
        raise ValueError("shift must be nonzero")
    u = field.values
    shifted = u
    sl = [slice(None)] * grid.ndim
    for a, s in enumerate(shift):
        if s == 0:
            continue
        if grid.periodic[a]:
            shifted = np.roll(shifted, -s, axis=a + 1)
        else:
            if abs(s) >= grid.extents[a]:
                raise ValueError(f"shift {s} exceeds the extent of bounded axis {a}")
            sl[a] = slice(0, grid.extents[a] - s) if s > 0 else slice(-s, grid.extents[a])
    if any(not grid.periodic[a] and s != 0 for a, s in enumerate(shift)):
        # realign shifted copy on bounded axes
        idx_src = [slice(None)] * grid.ndim
        for a, s in enumerate(shift):
            if not grid.periodic[a] and s != 0:
                idx_src[a] = slice(s, None) if s > 0 else slice(0, grid.extents[a] + s)
        base = u[(slice(None),) + tuple(sl)]
        other = shifted[(slice(None),) + tuple(idx_src)]
    else:
        base, other = u, shifted
    diff = base - other
    mag = np.sqrt(np.sum(diff ** 2, axis=0))
    return float(np.sum(mag ** 3) * grid.cell_volume / length)


def vmo_sweep(field: Field, region=None, epsilons=None, axes=None, label: str = "") -> SweepReport:
    """``vmo_modulus`` over an epsilon sweep, with its scaling fit."""
    if epsilons is None:
        epsilons = default_epsilons(field.grid, _resolve(field.grid, axes))
    vals = [vmo_modulus(field, region, e, axes) for e in epsilons]
    return SweepReport.from_values(list(epsilons), vals, label)


def group_moduli(field: Field, groups: dict, region=None, epsilon: float = None, axes=None) -> dict:
    """``vmo_modulus`` of each named component group (e.g. velocity vs density)."""
    out = {}
    for name, comps in groups.items():
        idx = [field.component_names.index(c) if isinstance(c, str) else int(c) for c in comps]
        sub = Field(field.grid, field.values[idx], [field.component_names[i] for i in idx])
        out[name] = vmo_modulus(sub, region, epsilon, axes)
    return out


# --------------------------------------------------------------------------- exponent conditions

CRITERIA = ("inhom-euler", "comp-euler", "mhd-caflisch", "mhd-kang-lee")


@dataclass(frozen=True)
class ConditionResult:
    criterion: str
    satisfied: bool
    margin: float
    statement: str


def exponent_condition_check(alpha: float, beta: float, criterion: str) -> ConditionResult:
    """Evaluate a mixed-exponent energy-conservation condition.

    * ``inhom-euler``: ``2 alpha + beta > 1``
    * ``comp-euler``: ``beta > max(1 - 2 alpha, (1 - alpha) / 2)``
    * ``mhd-caflisch``: ``alpha > 1/3`` and ``alpha + 2 beta > 1``
    * ``mhd-kang-lee``: ``alpha >= 1/3`` and ``alpha + 2 beta >= 1``

    ``margin`` is LHS - RHS, the smaller one for two-part conditions.
    """
    if criterion not in CRITERIA:
        raise ValueError(f"unknown criterion {criterion!r}; choose from {', '.join(CRITERIA)}")
    for nm, val in (("alpha", alpha), ("beta", beta)):
        if not 0.0 <= val <= 1.0:
            raise ValueError(f"{nm} must lie in [0, 1], got {val}")
    if criterion == "inhom-euler":
        margin = 2 * alpha + beta - 1
        return ConditionResult(criterion, margin > 0, margin, "2*alpha + beta > 1")
    if criterion == "comp-euler":
        margin = beta - max(1 - 2 * alpha, (1 - alpha) / 2)
        return ConditionResult(criterion, margin > 0, margin,
                               "beta > max(1 - 2*alpha, (1 - alpha)/2)")
    m1, m2 = alpha - 1.0 / 3.0, alpha + 2 * beta - 1
    margin = min(m1, m2)
    if criterion == "mhd-caflisch":
        return ConditionResult(criterion, m1 > 0 and m2 > 0, margin,
                               "alpha > 1/3 and alpha + 2*beta > 1")
    return ConditionResult(criterion, m1 >= 0 and m2 >= 0, margin,
                           "alpha >= 1/3 and alpha + 2*beta >= 1")


def structure_function(field: Field, shift) -> float:
    """Third-order structure function ``sum_X vol * |U(X+Z) - U(X)|^3`` (no ``1/|Z|``)."""
    grid = field.grid
    length = math.sqrt(sum((int(s) * h) ** 2 for s, h in zip(shift, grid.spacings)))
    return directional_modulus(field, shift) * length
