import json

import numpy as np
import pytest

from companionlaw import boundary, synth, systems
from companionlaw.besov import scaling_fit
from companionlaw.grid import Field, make_grid
from companionlaw.mollify import mollifier_kernel


def channel(nx=16, ny=256, nt=None, t_final=1.0):
    if nt is None:
        return make_grid(2, [nx, ny], periodic=[True, False])
    return make_grid(2, [nt, nx, ny], spacings=[t_final / nt, 1 / nx, 1 / ny],
                     periodic=[False, True, False], has_time=True)


def test_shell_mask_is_the_band():
    g = channel()
    spec = boundary.shell(g, 32 / 256)
    y = g.coords(1)
    d = np.minimum(y, 1 - y)
    band = (d >= 8 / 256) & (d <= 16 / 256)
    assert np.array_equal(spec.mask, np.broadcast_to(band, g.shape))
    assert spec.n_points == 16 * int(band.sum())


def test_shell_errors():
    g = channel()
    with pytest.raises(ValueError, match="must lie in"):
        boundary.shell(g, 0.5)
    with pytest.raises(ValueError, match="empty shell"):
        boundary.shell(g, 0.8 / 256)


def test_shear_flow_has_no_wall_flux(euler2):
    f = synth.shear_flow(channel(), pressure=2.0)
    for eps in (64 / 256, 32 / 256, 16 / 256):
        assert boundary.shell_integral(f, euler2, boundary.shell(f.grid, eps)) == 0.0


def test_cross_flow_wall_flux(euler2):
    g = channel(nt=8, t_final=2.0)
    vals = np.stack([np.zeros(g.shape), np.ones(g.shape), np.zeros(g.shape)])
    f = Field(g, vals, ("v1", "v2", "p"))
    # |q.n| = 1/2 on two bands of width eps/4, divided by eps, over time 2
    got = boundary.shell_integral(f, euler2, boundary.shell(g.spatial_grid(), 32 / 256))
    assert got == pytest.approx(0.25 * 2.0, rel=0.01)
    half = boundary.shell_integral(f, euler2, boundary.shell(g.spatial_grid(), 32 / 256), (0.0, 1.0))
    assert half == pytest.approx(0.25, rel=0.01)


def test_linearly_vanishing_normal_velocity(euler2):
    g = channel(ny=1024)
    _, y = g.mesh()
    f = Field(g, np.stack([np.ones(g.shape), np.sin(np.pi * y), np.ones(g.shape)]), ("v1", "v2", "p"))
    rep = boundary.shell_sweep(f, euler2, [64 / 1024, 32 / 1024, 16 / 1024, 8 / 1024])
    assert rep.fitted_exponent >= 0.9


def test_wall_cutoff_profile():
    g = channel(ny=1024)
    eps = 64 / 1024
    cut = boundary.boundary_test_function(g, eps)
    y = g.coords(1)
    d = np.minimum(y, 1 - y)
    assert np.all(cut.values[:, d <= eps / 4] == 0.0)
    assert np.all(cut.values[:, d >= eps / 2] == 1.0)
    # the quintic step on [1/4, 1/2] has peak slope 15/8 / (1/4) = 7.5
    assert 7.0 < cut.max_slope <= 7.5
    numeric = np.gradient(cut.values[0], y)
    assert np.max(np.abs(numeric - cut.gradient[1][0])) <= 0.02 * np.max(np.abs(cut.gradient))


def test_shear_balance_is_flat(euler2):
    f = synth.shear_flow(channel(nx=128, ny=512, nt=6), pressure=0.5)
    rep = boundary.global_balance(f, euler2, 0.25)
    assert np.ptp(rep.energy) <= 1e-12
    assert rep.closes() and rep.relative_closure() == 0.0


def shock(nt, n, t_final, ul, ur, x0):
    g = make_grid(1, [nt, n], spacings=[t_final / nt, 1 / n], has_time=True)
    return synth.burgers_shock(g, ul, ur, x0)


def test_stationary_shock_balance(burgers):
    rep = boundary.global_balance(shock(8, 2048, 0.25, 1.0, -1.0, 0.5), burgers, 0.125)
    assert np.allclose(rep.dEdt, 0.0, atol=1e-12)
    assert np.allclose(rep.interior, 2 / 3, rtol=0.02)
    assert np.allclose(rep.shell, -2 / 3, rtol=1e-3)
    assert rep.closes(0.05)


def test_moving_shock_balance(burgers):
    # dt chosen so the shock crosses whole cells between snapshots
    rep = boundary.global_balance(shock(8, 2048, 8 * 32 / 2048, 2.0, 0.0, 0.25), burgers, 0.125)
    assert np.allclose(rep.dEdt, 2.0, rtol=1e-9)
    assert rep.closes(0.05)
    payload = json.loads(rep.to_json())
    assert set(payload) == {"times", "energy", "dEdt", "interior", "shell", "closure"}


def test_balance_errors(burgers, euler2):
    f = shock(64, 256, 1.0, 1.0, -1.0, 0.5)
    with pytest.raises(ValueError, match="space-only"):
        boundary.global_balance(f, burgers, 0.25, mollifier_kernel(f.grid, 8 / 256, "all"))
    with pytest.raises(ValueError, match="too large"):
        boundary.global_balance(f, burgers, 0.125, mollifier_kernel(f.grid, 0.1, "space"))
    with pytest.raises(ValueError, match="time axis"):
        boundary.global_balance(synth.shear_flow(channel()), euler2, 0.125)
    with pytest.raises(ValueError, match="3 snapshots"):
        boundary.global_balance(shock(2, 256, 0.25, 1.0, -1.0, 0.5), burgers, 0.25)


def test_nested_moduli_report_each_margin():
    f = synth.shear_flow(channel(ny=256), synth.holder_profile(256, 0.3, seed=1))
    out = boundary.nested_moduli(f, 4 / 256, [0.05, 0.1, 0.2])
    assert [m for m, _ in out] == [0.05, 0.1, 0.2]
    assert all(v > 0 for _, v in out)
