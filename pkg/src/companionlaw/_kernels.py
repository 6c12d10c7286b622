"""Hot inner loops: stencil sums and cubed-increment sums.

Both loops run over a flattened, padded copy of the field so that a single
code path serves every grid dimension.  A numba implementation is used when
available; setting ``COMPANIONLAW_BACKEND=numpy`` forces the pure-numpy path.
Both paths accumulate over stencil offsets in the same order, so results agree
to rounding.
"""

from __future__ import annotations

import os

import numpy as np

# the TBB layer shipped with some distributions is too old for numba
os.environ.setdefault("NUMBA_THREADING_LAYER", "workqueue")

try:
    import numba
    from numba import njit, prange

    HAS_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAS_NUMBA = False


def backend() -> str:
    """Return the active backend name, ``"numba"`` or ``"numpy"``."""
    requested = os.environ.get("COMPANIONLAW_BACKEND", "numba").strip().lower()
    if requested not in ("numba", "numpy"):
        raise ValueError(f"COMPANIONLAW_BACKEND must be 'numba' or 'numpy', got {requested!r}")
    if requested == "numba" and HAS_NUMBA:
        return "numba"
    return "numpy"


def _configure_threads() -> None:
    threads = os.environ.get("COMPANIONLAW_THREADS")
    if threads and HAS_NUMBA:
        numba.set_num_threads(max(1, min(int(threads), numba.config.NUMBA_NUM_THREADS)))


# ---------------------------------------------------------------------------
# numpy reference path


def _stencil_sum_numpy(flat, base, offsets, weights):
    out = np.zeros((flat.shape[0], base.shape[0]))
    for k in range(offsets.shape[0]):
        out += weights[k] * flat[:, base + offsets[k]]
    return out


def _cubed_increments_numpy(flat, base, offsets):
    centre = flat[:, base]
    out = np.zeros(base.shape[0])
    for k in range(offsets.shape[0]):
        diff = centre - flat[:, base + offsets[k]]
        sq = np.zeros(base.shape[0])
        for c in range(flat.shape[0]):
            sq += diff[c] * diff[c]
        out += sq * np.sqrt(sq)
    return out


# ---------------------------------------------------------------------------
# numba path

if HAS_NUMBA:

    @njit(parallel=True, cache=True)
    def _stencil_sum_numba(flat, base, offsets, weights):
        ncomp = flat.shape[0]
        npts = base.shape[0]
        nk = offsets.shape[0]
        out = np.zeros((ncomp, npts))
        for i in prange(npts):
            b = base[i]
            for c in range(ncomp):
                s = 0.0
                for k in range(nk):
                    s += weights[k] * flat[c, b + offsets[k]]
                out[c, i] = s
        return out

    @njit(parallel=True, cache=True)
    def _cubed_increments_numba(flat, base, offsets):
        ncomp = flat.shape[0]
        npts = base.shape[0]
        nk = offsets.shape[0]
        out = np.zeros(npts)
        for i in prange(npts):
            b = base[i]
            s = 0.0
            for k in range(nk):
                sq = 0.0
                for c in range(ncomp):
                    d = flat[c, b] - flat[c, b + offsets[k]]
                    sq += d * d
                s += sq * np.sqrt(sq)
            out[i] = s
        return out


def stencil_sum(flat, base, offsets, weights):
    """Weighted stencil sum ``out[c, i] = sum_k w[k] * flat[c, base[i] + off[k]]``.

    Parameters
    ----------
    flat : ndarray, shape (ncomp, P)
        Padded field, flattened per component.
    base : ndarray of int64, shape (M,)
        Linear index of each output point inside the padded array.
    offsets : ndarray of int64, shape (K,)
        Linear stencil offsets.
    weights : ndarray, shape (K,)
    """
    flat = np.ascontiguousarray(flat, dtype=np.float64)
    base = np.ascontiguousarray(base, dtype=np.int64)
    offsets = np.ascontiguousarray(offsets, dtype=np.int64)
    weights = np.ascontiguousarray(weights, dtype=np.float64)
    if backend() == "numba":
        _configure_threads()
        return _stencil_sum_numba(flat, base, offsets, weights)
    return _stencil_sum_numpy(flat, base, offsets, weights)


def cubed_increments(flat, base, offsets):
    """Per-point sum of ``|U(x) - U(x + off_k)|**3`` over the offsets.

    ``|.|`` is the Euclidean norm across components.
    """
    flat = np.ascontiguousarray(flat, dtype=np.float64)
    base = np.ascontiguousarray(base, dtype=np.int64)
    offsets = np.ascontiguousarray(offsets, dtype=np.int64)
    if backend() == "numba":
        _configure_threads()
        return _cubed_increments_numba(flat, base, offsets)
    return _cubed_increments_numpy(flat, base, offsets)


def pad_and_flatten(values, pad, periodic):
    """Pad a component-first array and compute flat indexing helpers.

    Parameters
    ----------
    values : ndarray, shape (ncomp, *extents)
    pad : sequence of int
        Halo width per grid axis.
    periodic : sequence of bool
        Wrap-around padding on periodic axes, zeros elsewhere.

    Returns
    -------
    flat : ndarray, shape (ncomp, P)
    base : ndarray of int64
        Linear index of every original grid point (C order) inside the padded array.
    strides : tuple of int
        Element strides of the padded grid, used to linearise offsets.
    """
    padded = values
    for ax, (w, per) in enumerate(zip(pad, periodic)):
        if w == 0:
            continue
        widths = [(0, 0)] * padded.ndim
        widths[ax + 1] = (w, w)
        if per:
            n = padded.shape[ax + 1]
            reps = -(-w // n)
            if reps > 1:
                # halo wider than the axis: tile before wrapping
                tiled = np.concatenate([padded] * (2 * reps + 1), axis=ax + 1)
                start = reps * n - w
                sl = [slice(None)] * padded.ndim
                sl[ax + 1] = slice(start, start + n + 2 * w)
                padded = tiled[tuple(sl)]
            else:
                padded = np.pad(padded, widths, mode="wrap")
        else:
            padded = np.pad(padded, widths, mode="constant")
    shape = padded.shape[1:]
    strides = tuple(int(np.prod(shape[ax + 1:])) for ax in range(len(shape)))
    grids = np.meshgrid(*[np.arange(n) + w for n, w in zip(values.shape[1:], pad)], indexing="ij")
    base = np.zeros(values.shape[1:], dtype=np.int64)
    for g, s in zip(grids, strides):
        base += g.astype(np.int64) * s
    flat = padded.reshape(padded.shape[0], -1)
    return flat, base.ravel(), strides


def linear_offsets(offsets, strides):
    """Convert integer offset vectors ``(K, ndim)`` to linear offsets."""
    offsets = np.asarray(offsets, dtype=np.int64).reshape(-1, len(strides))
    return offsets @ np.asarray(strides, dtype=np.int64)
