"""Seeded test-field generators with known regularity or exact-solution status.

Randomness comes from ``numpy.random.default_rng`` fed by
``SeedSequence(seed).spawn(n)``: component ``c`` always draws from the
``c``-th child stream, so adding components never perturbs earlier ones.
"""

from __future__ import annotations

import warnings

import numpy as np

from .grid import Field, Grid, make_grid

MODES = ("constant", "smooth-random", "holder")
_MAX_SYNTH_POINTS = 2 ** 25


def _streams(seed: int, n: int) -> list[np.random.Generator]:
    return [np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(n)]


def _holder_array(shape, alpha: float, rng: np.random.Generator, cutoff=None) -> np.ndarray:
    """Random-phase power-law synthesis on a periodic lattice, unit RMS.

    A ``cutoff`` above the Nyquist wavenumber is honoured by synthesising on a
    refined lattice and point-sampling it, so the returned samples carry the
    sub-grid modes a continuum field would have.
    """
    d = len(shape)
    refine = 1
    if cutoff is not None:
        if cutoff <= 0:
            raise ValueError("cutoff must be positive")
        nyquist = min(shape) / 2.0
        while cutoff > nyquist * refine:
            refine *= 2
    fine = tuple(n * refine for n in shape)
    if int(np.prod(fine)) > _MAX_SYNTH_POINTS:
        raise ValueError(f"cutoff {cutoff} needs a {fine} synthesis lattice; too large")
    freqs = [np.fft.fftfreq(n, 1.0 / n) for n in fine[:-1]] + [np.fft.rfftfreq(fine[-1], 1.0 / fine[-1])]
    kk = np.meshgrid(*freqs, indexing="ij")
    kmag = np.sqrt(sum(k * k for k in kk))
    amp = np.zeros_like(kmag)
    live = kmag > 0
    if cutoff is not None:
        live &= kmag <= cutoff
    amp[live] = kmag[live] ** (-(alpha + d / 2.0))
    phase = rng.uniform(0.0, 2.0 * np.pi, size=kmag.shape)
    out = np.fft.irfftn(amp * np.exp(1j * phase), s=fine, axes=tuple(range(d)))
    out = out[(slice(None, None, refine),) * d]
    rms = np.sqrt(np.mean(out ** 2))
    return out / rms if rms > 0 else out


def holder_field(grid: Grid, alpha: float, n_components: int = 1, seed: int = 0,
                 cutoff: float | None = None, names=None) -> Field:
    """Monofractal field with spectrum amplitude ``|kappa|^-(alpha + d/2)``.

    Every axis must be periodic (so no time axis).  ``cutoff`` limits the
    wavenumber magnitude; ``None`` keeps all resolved modes.  Each component
    is normalised to unit RMS.  A cutoff beyond the grid's Nyquist wavenumber
    yields point samples of a finer synthesis, which sharpens small-scale
    exponent estimates.
    """
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    if not all(grid.periodic):
        raise ValueError("holder_field needs a fully periodic grid; window a periodic field "
                         "for bounded domains")
    if n_components < 1:
        raise ValueError("n_components must be >= 1")
    vals = np.stack([_holder_array(grid.shape, alpha, rng, cutoff)
                     for rng in _streams(seed, n_components)])
    names = names or tuple(f"u{i}" for i in range(n_components))
    return Field(grid, vals, names)


def holder_profile(n: int, alpha: float, seed: int = 0, cutoff: float | None = None) -> np.ndarray:
    """A 1D Holder-``alpha`` sample path of length ``n`` (unit RMS), usable as a shear profile."""
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    return _holder_array((n,), alpha, _streams(seed, 1)[0], cutoff)


def burgers_shock(grid: Grid, u_left: float, u_right: float, x0: float) -> Field:
    """Single entropic shock ``u_left | u_right`` starting at ``x0``, moving at ``(u_left + u_right)/2``.

    Snapshots at or after the time the shock reaches a wall are dropped with
    a warning.
    """
    if grid.spatial_dims != 1 or not grid.has_time:
        raise ValueError("burgers_shock needs a 1D space-time grid")
    if grid.periodic[1]:
        raise ValueError("burgers_shock needs a bounded spatial axis")
    if not u_left > u_right:
        raise ValueError(f"rarefaction data u_left={u_left} <= u_right={u_right} is not a single-shock solution")
    length = grid.lengths[1]
    if not 0.0 < x0 < length:
        raise ValueError(f"x0={x0} must lie inside (0, {length})")
    speed = 0.5 * (u_left + u_right)
    t = grid.coords(0)
    if speed != 0:
        exit_time = (length - x0) / speed if speed > 0 else -x0 / speed
        keep = int(np.sum(t < exit_time))
        if keep < grid.extents[0]:
            if keep < 2:
                raise ValueError(f"the shock leaves the domain at t={exit_time:.6g} before two snapshots")
            warnings.warn(f"shock exits at t={exit_time:.6g}; truncating to {keep} snapshots", stacklevel=2)
            grid = grid.with_time_extent(keep)
            t = grid.coords(0)
    tt, xx = grid.mesh()
    u = np.where(xx < x0 + speed * tt, float(u_left), float(u_right))
    return Field(grid, u[None], ("u",))


def _is_channel(grid: Grid) -> bool:
    sp = grid.spatial_axes
    return grid.spatial_dims == 2 and grid.periodic[sp[0]] and not grid.periodic[sp[1]]


def shear_flow(grid: Grid, profile=None, pressure: float = 0.0) -> Field:
    """Stationary channel flow ``(v1, v2, p) = (f(y), 0, p0)``.

    ``profile`` is a callable of ``y`` or an array with one value per ``y``
    cell; the default is ``sin(pi y / L)``.
    """
    if not _is_channel(grid):
        raise ValueError("shear_flow needs a 2D channel grid (periodic x1, bounded x2)")
    ya = grid.spatial_axes[1]
    y = grid.coords(ya)
    if profile is None:
        f = np.sin(np.pi * y / grid.lengths[ya])
    elif callable(profile):
        f = np.asarray(profile(y), dtype=float) * np.ones_like(y)
    else:
        f = np.asarray(profile, dtype=float)
        if f.shape != y.shape:
            raise ValueError(f"profile needs {y.size} samples, got {f.shape}")
    shape = [1] * grid.ndim
    shape[ya] = -1
    v1 = np.broadcast_to(f.reshape(shape), grid.shape)
    vals = np.stack([v1, np.zeros(grid.shape), np.full(grid.shape, float(pressure))])
    return Field(grid, vals, ("v1", "v2", "p"))


def _smooth_unit(grid: Grid, rng: np.random.Generator, n_modes: int = 3) -> np.ndarray:
    """Smooth random function with ``max |.| = 1`` built from a few low modes."""
    mesh = grid.mesh()
    out = np.zeros(grid.shape)
    for _ in range(n_modes):
        wave = rng.integers(0, 3, size=grid.ndim)
        if not wave.any():
            wave[-1] = 1
        arg = np.zeros(grid.shape)
        for a, x in enumerate(mesh):
            arg += 2.0 * np.pi * wave[a] * x / grid.lengths[a]
        out += rng.normal() * np.cos(arg + rng.uniform(0.0, 2.0 * np.pi))
    peak = np.max(np.abs(out))
    return out / peak if peak > 0 else out


def manufactured_state(system, grid: Grid, mode: str = "smooth-random", seed: int = 0,
                       alpha: float = 0.5, fill: float = 0.9) -> Field:
    """An in-domain field for a registry system.

    ``constant`` uses the system's reference state.  ``smooth-random`` and
    ``holder`` place each component at ``centre + fill * halfwidth * s`` of its
    sampling box, with ``s`` a smooth (resp. Holder-``alpha``) random function
    scaled to ``max |s| = 1``.  These are diagnostic inputs, not solutions.
    """
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}; choose from {', '.join(MODES)}")
    if grid.spatial_dims != system.k:
        raise ValueError(f"{system.name} has k={system.k}, grid has {grid.spatial_dims} spatial dims")
    if mode == "constant":
        vals = np.stack([np.full(grid.shape, v) for v in system.reference_state])
        return Field(grid, vals, system.component_names)
    streams = _streams(seed, system.n)
    parts = []
    for (lo, hi), rng in zip(system.sampling_box, streams):
        if mode == "holder":
            if not all(grid.periodic):
                raise ValueError("holder mode needs a fully periodic grid")
            s = _holder_array(grid.shape, alpha, rng)
            s = s / np.max(np.abs(s))
        else:
            s = _smooth_unit(grid, rng)
        parts.append(0.5 * (lo + hi) + fill * 0.5 * (hi - lo) * s)
    return Field(grid, np.stack(parts), system.component_names)


def periodic_line(n: int) -> Grid:
    """Unit-length periodic 1D grid with ``n`` cells."""
    return make_grid(1, [n], periodic=[True])
