"""Uniform space(-time) grids, sampled fields, box boundary geometry and norms.

Conventions
-----------
* Axis order is ``(t, x1, ..., xk)`` when a time axis is present, else
  ``(x1, ..., xk)``.
* Samples sit at cell centres ``(i + 1/2) * h`` of the box ``[0, N h]``.  On
  bounded axes the faces are at ``0`` and ``N h``; integrals are midpoint sums.
* Field data is stored component-first: ``values[c, t, x1, ..., xk]``.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

import numpy as np


@dataclass(frozen=True)
class Grid:
    spatial_dims: int
    has_time: bool
    extents: tuple[int, ...]
    spacings: tuple[float, ...]
    periodic: tuple[bool, ...]

    def __post_init__(self):
        ndim = self.spatial_dims + int(self.has_time)
        if self.spatial_dims not in (1, 2, 3):
            raise ValueError(f"spatial_dims must be 1, 2 or 3, got {self.spatial_dims}")
        for name in ("extents", "spacings", "periodic"):
            if len(getattr(self, name)) != ndim:
                raise ValueError(f"{name} needs {ndim} entries, got {len(getattr(self, name))}")
        if any(int(n) < 2 for n in self.extents):
            raise ValueError(f"all extents must be >= 2, got {self.extents}")
        if any(not (h > 0 and np.isfinite(h)) for h in self.spacings):
            raise ValueError(f"all spacings must be positive and finite, got {self.spacings}")
        if self.has_time and self.periodic[0]:
            raise ValueError("the time axis cannot be periodic")

    @property
    def ndim(self) -> int:
        return len(self.extents)

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(int(n) for n in self.extents)

    @property
    def time_axis(self) -> int | None:
        return 0 if self.has_time else None

    @property
    def spatial_axes(self) -> tuple[int, ...]:
        start = int(self.has_time)
        return tuple(range(start, start + self.spatial_dims))

    @property
    def lengths(self) -> tuple[float, ...]:
        return tuple(n * h for n, h in zip(self.extents, self.spacings))

    @property
    def cell_volume(self) -> float:
        return float(np.prod(self.spacings))

    @property
    def spatial_cell_volume(self) -> float:
        return float(np.prod([self.spacings[a] for a in self.spatial_axes]))

    @property
    def bounded_spatial_axes(self) -> tuple[int, ...]:
        return tuple(a for a in self.spatial_axes if not self.periodic[a])

    def coords(self, axis: int) -> np.ndarray:
        """Cell-centre coordinates along one axis."""
        return (np.arange(self.extents[axis]) + 0.5) * self.spacings[axis]

    def mesh(self) -> list[np.ndarray]:
        """Coordinate arrays broadcast to the full grid shape."""
        return np.meshgrid(*[self.coords(a) for a in range(self.ndim)], indexing="ij")

    @property
    def epsilon0(self) -> float:
        """Tubular-neighbourhood width: half the shortest bounded spatial length."""
        bounded = self.bounded_spatial_axes
        if not bounded:
            raise ValueError("no boundary: every spatial axis is periodic")
        return 0.5 * min(self.lengths[a] for a in bounded)

    def spatial_grid(self) -> "Grid":
        """The grid with its time axis dropped."""
        if not self.has_time:
            return self
        return Grid(self.spatial_dims, False, self.extents[1:], self.spacings[1:], self.periodic[1:])

    def with_time_extent(self, nt: int) -> "Grid":
        if not self.has_time:
            raise ValueError("grid has no time axis")
        return Grid(self.spatial_dims, True, (nt,) + self.extents[1:], self.spacings, self.periodic)


def make_grid(spatial_dims, extents, spacings=None, periodic=None, has_time=False) -> Grid:
    """Build a validated :class:`Grid`.

    ``spacings`` defaults to unit-box steps ``1/N`` per axis and ``periodic``
    to all-False.  Per-axis arguments include the time axis first when
    ``has_time`` is set.
    """
    extents = tuple(int(n) for n in extents)
    if spacings is None:
        spacings = tuple(1.0 / n for n in extents)
    if periodic is None:
        periodic = (False,) * len(extents)
    return Grid(int(spatial_dims), bool(has_time), extents,
                tuple(float(h) for h in spacings), tuple(bool(p) for p in periodic))


@dataclass(frozen=True, eq=False)
class Field:
    """``n``-component real samples on a grid.

    ``window`` optionally restricts where values are meaningful (one slice per
    axis); it is set by interior operations such as mollification, and values
    outside it are stored as zeros.
    """

    grid: Grid
    values: np.ndarray
    component_names: tuple[str, ...]
    window: tuple[slice, ...] | None = dc_field(default=None)

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=np.float64)
        if vals.ndim == self.grid.ndim:
            vals = vals[None]
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "component_names", tuple(self.component_names))
        if vals.shape[1:] != self.grid.shape:
            raise ValueError(f"data shape {vals.shape[1:]} does not match grid {self.grid.shape}")
        if len(self.component_names) != vals.shape[0]:
            raise ValueError(
                f"{vals.shape[0]} components but {len(self.component_names)} names")
        if not np.all(np.isfinite(vals)):
            bad = np.argwhere(~np.isfinite(vals))[0]
            raise ValueError(f"non-finite sample in component "
                             f"{self.component_names[bad[0]]!r} at index {tuple(int(i) for i in bad[1:])}")
        if self.window is not None and len(self.window) != self.grid.ndim:
            raise ValueError("window needs one slice per axis")

    @property
    def n_components(self) -> int:
        return self.values.shape[0]

    @property
    def mask(self) -> np.ndarray:
        m = np.zeros(self.grid.shape, dtype=bool)
        m[self.window if self.window is not None else ...] = True
        return m

    def component(self, name: str) -> np.ndarray:
        return self.values[self.component_names.index(name)]

    def replace(self, values=None, names=None, window="keep") -> "Field":
        return Field(self.grid,
                     self.values if values is None else values,
                     self.component_names if names is None else names,
                     self.window if window == "keep" else window)


def constant_field(grid: Grid, value, names=None) -> Field:
    value = np.atleast_1d(np.asarray(value, dtype=float))
    names = names or tuple(f"u{i}" for i in range(value.size))
    vals = np.broadcast_to(value.reshape((-1,) + (1,) * grid.ndim), (value.size,) + grid.shape)
    return Field(grid, vals.copy(), names)


@dataclass(frozen=True, eq=False)
class BoundaryGeometry:
    """Distance, nearest boundary point and outward normal on the spatial grid.

    Arrays are indexed by spatial grid indices only.  ``face_axis`` is the
    spatial position (0..k-1) of the axis carrying the nearest face.
    """

    grid: Grid
    distance: np.ndarray
    sigma: np.ndarray
    normal: np.ndarray
    face_axis: np.ndarray


def boundary_geometry(grid: Grid) -> BoundaryGeometry:
    """Distance to the nearest bounded face, its foot point and outward normal.

    Ties between faces are resolved toward the smallest axis index, and on a
    single axis toward the lower face.
    """
    sgrid = grid.spatial_grid()
    bounded = [a for a in range(sgrid.ndim) if not sgrid.periodic[a]]
    if not bounded:
        raise ValueError("no boundary: every spatial axis is periodic")
    mesh = sgrid.mesh()
    shape = sgrid.shape
    distance = np.full(shape, np.inf)
    face_axis = np.full(shape, -1, dtype=np.int64)
    side = np.zeros(shape)
    for a in bounded:
        x = mesh[a]
        length = sgrid.lengths[a]
        lower, upper = x, length - x
        d_axis = np.minimum(lower, upper)
        s_axis = np.where(lower <= upper, -1.0, 1.0)
        closer = d_axis < distance  # strict: earlier axes win ties
        distance = np.where(closer, d_axis, distance)
        face_axis = np.where(closer, a, face_axis)
        side = np.where(closer, s_axis, side)
    normal = np.zeros((sgrid.ndim,) + shape)
    sigma = np.array([m.copy() for m in mesh])
    for a in bounded:
        on = face_axis == a
        normal[a][on] = side[on]
        sigma[a][on] = np.where(side[on] < 0, 0.0, sgrid.lengths[a])
    return BoundaryGeometry(grid, distance, sigma, normal, face_axis)


def broadcast_spatial(grid: Grid, arr: np.ndarray) -> np.ndarray:
    """Broadcast a spatial-grid array across the time axis, if any."""
    if grid.has_time:
        return np.broadcast_to(arr[None], grid.shape)
    return arr


def region_mask(grid: Grid, region) -> np.ndarray:
    """Normalise a region given as ``None``, a boolean array or a predicate.

    A predicate receives the coordinate arrays (one per axis) and returns a
    boolean array.
    """
    if region is None:
        return np.ones(grid.shape, dtype=bool)
    if callable(region):
        m = np.asarray(region(*grid.mesh()), dtype=bool)
    else:
        m = np.asarray(region, dtype=bool)
    return np.broadcast_to(m, grid.shape)


def margin_region(grid: Grid, margin: float) -> np.ndarray:
    """Points at least ``margin`` (fraction of the axis length) from bounded faces.

    Applies to bounded spatial axes and the time axis.
    """
    m = np.ones(grid.shape, dtype=bool)
    mesh = grid.mesh()
    for a in range(grid.ndim):
        if grid.periodic[a]:
            continue
        length = grid.lengths[a]
        m &= (mesh[a] >= margin * length) & (mesh[a] <= (1 - margin) * length)
    return m


def lp_norm(field: Field, p: float, region=None) -> float:
    """Discrete ``L^p`` norm of the pointwise Euclidean magnitude.

    Computes ``(sum |U|^p * cell_volume) ** (1/p)`` over the region (intersected
    with the field's window).
    """
    if p < 1:
        raise ValueError(f"p must be >= 1, got {p}")
    mask = region_mask(field.grid, region) & field.mask
    if not mask.any():
        raise ValueError("empty region")
    return array_lp_norm(field.values, p, field.grid.cell_volume, mask)


def array_lp_norm(values: np.ndarray, p: float, cell_volume: float, mask=None) -> float:
    """``L^p`` norm of a component-first array, magnitudes taken over axis 0.

    Magnitudes are rescaled by their maximum first, so tiny or huge values
    neither underflow nor overflow.
    """
    values = np.asarray(values, dtype=float)
    peak = float(np.max(np.abs(values[(slice(None),) + ((mask,) if mask is not None else ())])))
    if peak == 0.0:
        return 0.0
    mag = np.sqrt(np.sum((values / peak) ** 2, axis=0))
    if mask is not None:
        mag = mag[mask]
    return peak * float(np.sum(mag ** p) * cell_volume) ** (1.0 / p)


def central_difference(arr: np.ndarray, axis: int, h: float, periodic: bool) -> np.ndarray:
    """Second-order centred derivative along ``axis`` (one-sided at bounded ends)."""
    if periodic:
        return (np.roll(arr, -1, axis=axis) - np.roll(arr, 1, axis=axis)) / (2.0 * h)
    if arr.shape[axis] < 3:
        return np.gradient(arr, h, axis=axis)
    return np.gradient(arr, h, axis=axis, edge_order=2)

