import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from companionlaw import _kernels


def _both(fn, *args):
    with pytest.MonkeyPatch.context() as mp:
        mp.setenv("COMPANIONLAW_BACKEND", "numba")
        a = fn(*args)
        mp.setenv("COMPANIONLAW_BACKEND", "numpy")
        b = fn(*args)
    return a, b


@given(data=st.data())
def test_stencil_sum_backends_agree(data):
    ncomp = data.draw(st.integers(1, 3))
    size = data.draw(st.integers(8, 40))
    flat = data.draw(arrays(np.float64, (ncomp, size), elements=st.floats(-10, 10)))
    offsets = np.array(data.draw(st.lists(st.integers(-3, 3), min_size=1, max_size=6)), dtype=np.int64)
    weights = np.array(data.draw(st.lists(st.floats(-2, 2), min_size=len(offsets),
                                          max_size=len(offsets))))
    base = np.arange(3, size - 3, dtype=np.int64)
    a, b = _both(_kernels.stencil_sum, flat, base, offsets, weights)
    assert np.array_equal(a, b)


@given(data=st.data())
def test_cubed_increments_backends_agree(data):
    ncomp = data.draw(st.integers(1, 3))
    size = data.draw(st.integers(8, 40))
    flat = data.draw(arrays(np.float64, (ncomp, size), elements=st.floats(-10, 10)))
    offsets = np.array(data.draw(st.lists(st.integers(-3, 3), min_size=1, max_size=6)), dtype=np.int64)
    base = np.arange(3, size - 3, dtype=np.int64)
    a, b = _both(_kernels.cubed_increments, flat, base, offsets)
    assert np.array_equal(a, b)


def test_cubed_increments_oracle():
    flat = np.array([[0.0, 1.0, 3.0], [0.0, 0.0, 4.0]])
    out = _kernels.cubed_increments(flat, np.array([1]), np.array([-1, 1]))
    # |(1,0)-(0,0)|^3 + |(1,0)-(3,4)|^3 = 1 + (sqrt(20))^3
    assert out[0] == pytest.approx(1 + 20 ** 1.5)


@pytest.mark.parametrize("n,pad", [(5, 2), (3, 7), (4, 4)])
def test_periodic_padding_wraps(n, pad):
    vals = np.arange(n, dtype=float)[None]
    flat, base, strides = _kernels.pad_and_flatten(vals, [pad], [True])
    for off in range(-pad, pad + 1):
        got = flat[0, base + off]
        assert np.array_equal(got, np.roll(vals[0], -off))


def test_bounded_padding_is_zero():
    vals = np.ones((1, 3, 4))
    flat, base, strides = _kernels.pad_and_flatten(vals, [1, 2], [False, False])
    assert flat.shape == (1, 5 * 8)
    assert flat.sum() == 12
    lin = _kernels.linear_offsets([[1, 0], [0, -2]], strides)
    assert list(lin) == [8, -2]


def test_backend_selection(monkeypatch):
    monkeypatch.setenv("COMPANIONLAW_BACKEND", "numpy")
    assert _kernels.backend() == "numpy"
    monkeypatch.setenv("COMPANIONLAW_BACKEND", "fortran")
    with pytest.raises(ValueError):
        _kernels.backend()
