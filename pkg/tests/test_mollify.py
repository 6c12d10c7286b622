import numpy as np
import pytest

from companionlaw import besov, mollify as mo, synth, systems
from companionlaw.grid import Field, array_lp_norm, constant_field, make_grid

from conftest import line_field


def test_unit_mass_and_support():
    g = make_grid(2, [64, 64])
    for eps in (2 / 64, 5.5 / 64, 12 / 64):
        k = mo.mollifier_kernel(g, eps)
        assert abs(k.weights.sum() * k.cell_volume - 1) <= 1e-14
        assert np.all(k.weights >= 0)
        assert np.all(np.sqrt(np.sum(k.physical_offsets() ** 2, axis=1)) < eps)


def test_under_resolved():
    with pytest.raises(ValueError, match="epsilon under-resolved"):
        mo.mollifier_kernel(make_grid(1, [64]), 1 / 64)


def test_space_only_kernel_leaves_time_alone():
    g = make_grid(1, [16, 64], has_time=True)
    k = mo.mollifier_kernel(g, 4 / 64, "space")
    assert k.axes == (1,) and k.halo[0] == 0
    t = g.mesh()[0]
    f = Field(g, (t ** 2)[None], ("u",))
    out = mo.mollify(f, k)
    assert np.allclose(out.values[0][out.window], (t ** 2)[out.window], rtol=0, atol=1e-14)


def test_constant_linear_quadratic():
    g = make_grid(1, [256])
    k = mo.mollifier_kernel(g, 8 / 256)
    x = g.coords(0)
    c = mo.mollify(constant_field(g, 2.5), k)
    assert np.allclose(c.values[0][c.window], 2.5, atol=1e-14)
    lin = mo.mollify(Field(g, (3 * x + 1)[None], ("u",)), k)
    assert np.max(np.abs(lin.values[0][lin.window] - (3 * x + 1)[lin.window])) <= 1e-13
    quad = mo.mollify(Field(g, (x ** 2)[None], ("u",)), k)
    expect = x ** 2 + k.moment2(0)
    assert np.max(np.abs(quad.values[0][quad.window] - expect[quad.window])) <= 1e-14
    # the window is exactly the set whose eps-ball stays in [0, 1]
    inside = (x - k.epsilon >= -1e-12) & (x + k.epsilon <= 1 + 1e-12)
    assert np.array_equal(quad.mask, inside)


def test_moment2_oracle_against_continuum():
    # discrete m2 tends to the continuum second moment of the 1D bump
    g = make_grid(1, [4096])
    k = mo.mollifier_kernel(g, 64 / 4096)
    eps = k.epsilon
    # int s^2 (1-s^2/e^2)^3 ds / int (1-s^2/e^2)^3 ds = (32/315)/(32/35) e^2 = e^2 / 9
    assert k.moment2(0) == pytest.approx(eps ** 2 / 9, rel=1e-3)


def test_empty_interior():
    g = make_grid(1, [16])
    with pytest.raises(ValueError, match="empty shrunk interior"):
        mo.mollify(constant_field(g, 1.0), mo.mollifier_kernel(g, 8 / 16))


def test_gradient_constant_and_affine():
    g = make_grid(2, [64, 64])
    k = mo.mollifier_kernel(g, 6 / 64)
    x, y = g.mesh()
    f = Field(g, np.stack([np.full(g.shape, 4.0), 2 * x - 5 * y]), ("c", "a"))
    d = mo.mollified_gradient(f, k)
    w = d.window
    assert d.component_names == ("d0_c", "d1_c", "d0_a", "d1_a")
    assert np.max(np.abs(d.values[:2][(slice(None),) + w])) <= 1e-12
    assert np.max(np.abs(d.values[2][w] - 2)) <= 1e-10
    assert np.max(np.abs(d.values[3][w] + 5)) <= 1e-10


def test_burgers_commutator_oracle(burgers):
    f = line_field(256, lambda x: x, periodic=False)
    k = mo.mollifier_kernel(f.grid, 8 / 256)
    c = mo.commutator(f, burgers, k)
    assert c.component_names == ("G[u][t]", "G[u][x1]")
    w = c.window
    assert np.max(np.abs(c.values[0][w])) == 0.0
    assert np.max(np.abs(c.values[1][w] - k.moment2(0) / 2)) <= 1e-15


def test_affine_rows_vanish(comp_euler_1d):
    g = make_grid(1, [512], periodic=[True])
    f = synth.manufactured_state(comp_euler_1d, g, "holder", seed=3, alpha=0.3)
    c = mo.commutator(f, comp_euler_1d, mo.mollifier_kernel(g, 6 / 512))
    cols = comp_euler_1d.k + 1
    for r in comp_euler_1d.affine_rows:
        assert np.max(np.abs(c.values[r * cols:(r + 1) * cols])) <= 1e-12


def test_domain_violation_names_component(comp_euler_1d):
    g = make_grid(1, [64], periodic=[True])
    vals = np.stack([np.full(64, 1.0), np.zeros(64)])
    vals[0, 10] = 0.2
    with pytest.raises(ValueError, match="'rho'.*\\(10,\\)"):
        mo.commutator(Field(g, vals, ("rho", "m1")), comp_euler_1d, mo.mollifier_kernel(g, 4 / 64))


def test_smoothness_gain_quadratic_rate():
    f = line_field(2048, lambda x: np.sin(2 * np.pi * x) + 0.3 * np.cos(6 * np.pi * x))
    eps = besov.default_epsilons(f.grid, None, 64, 8)
    errs = []
    for e in eps:
        m = mo.mollify(f, mo.mollifier_kernel(f.grid, e))
        errs.append(array_lp_norm(m.values - f.values, 3, f.grid.cell_volume))
    assert besov.scaling_fit(eps, errs)[0] >= 1.9


def test_gradient_and_commutator_bounds_uniform(burgers):
    g = make_grid(1, [2048], periodic=[True])
    f = synth.holder_field(g, 0.4, seed=2, cutoff=4 * 2048)
    grad_q, comm_q = [], []
    for e in besov.default_epsilons(g):
        k = mo.mollifier_kernel(g, e)
        omega = besov.vmo_modulus(f, None, e)
        gn = array_lp_norm(mo.mollified_gradient(f, k).values, 3, g.cell_volume)
        cn = array_lp_norm(mo.commutator(f, burgers, k).values, 1.5, g.cell_volume)
        grad_q.append(gn / (omega ** (1 / 3) * e ** (-2 / 3)))
        comm_q.append(cn / (e * omega) ** (2 / 3))
    assert max(grad_q) / min(grad_q) <= 3
    assert max(comm_q) / min(comm_q) <= 3
