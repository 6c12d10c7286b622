import json
import warnings

import numpy as np
import pytest
from hypothesis import given, strategies as st

from companionlaw import besov, synth
from companionlaw.grid import Field, constant_field, make_grid

from conftest import line_field


def brute_force_vmo(u, h, eps):
    n = u.size
    m = int(np.floor(eps / h * (1 + 1e-12)))
    total = 0.0
    for i in range(n):
        acc = 0.0
        for o in range(-m, m + 1):
            acc += abs(u[i] - u[(i + o) % n]) ** 3
        total += acc / (2 * m + 1) * h
    return total / eps


def test_vmo_matches_brute_force():
    f = line_field(1024, lambda x: np.sin(2 * np.pi * x))
    for eps in (1 / 64, 1 / 128, 3 / 256):
        oracle = brute_force_vmo(f.values[0], 1 / 1024, eps)
        assert besov.vmo_modulus(f, None, eps) == pytest.approx(oracle, rel=1e-12)


def test_vmo_constant_is_zero():
    assert besov.vmo_modulus(constant_field(make_grid(2, [16, 16], periodic=[True, True]), 3.0),
                             None, 3 / 16) == 0.0


def test_vmo_boundary_error():
    f = constant_field(make_grid(1, [64]), 1.0)
    with pytest.raises(ValueError, match="boundary"):
        besov.vmo_modulus(f, None, 4 / 64)
    inner = lambda x: (x > 0.2) & (x < 0.8)
    assert besov.vmo_modulus(f, inner, 4 / 64) == 0.0


@given(shift=st.tuples(st.integers(-20, 20), st.integers(-20, 20)), seed=st.integers(0, 50))
def test_vmo_translation_invariant(shift, seed):
    g = make_grid(2, [24, 20], periodic=[True, True])
    f = Field(g, np.random.default_rng(seed).standard_normal((1, 24, 20)), ("u",))
    moved = Field(g, np.roll(f.values, shift, axis=(1, 2)), ("u",))
    a, b = besov.vmo_modulus(f, None, 3 / 20), besov.vmo_modulus(moved, None, 3 / 20)
    assert b == pytest.approx(a, rel=1e-12)


@given(lam=st.floats(-4, 4).filter(lambda v: abs(v) > 1e-3), seed=st.integers(0, 50))
def test_vmo_cubic_homogeneity(lam, seed):
    f = line_field(128, lambda x: np.random.default_rng(seed).standard_normal(x.size))
    scaled = Field(f.grid, lam * f.values, ("u",))
    assert besov.vmo_modulus(scaled, None, 5 / 128) == pytest.approx(
        abs(lam) ** 3 * besov.vmo_modulus(f, None, 5 / 128), rel=1e-12)


def test_vmo_holder_slope():
    g = make_grid(1, [4096], periodic=[True])
    f = synth.holder_field(g, 0.4, seed=7)
    rep = besov.vmo_sweep(f)
    assert abs(rep.fitted_exponent - 0.2) <= 0.15


def test_vmo_refinement_stable():
    coarse = line_field(1024, lambda x: np.sin(2 * np.pi * x) ** 3)
    fine = line_field(2048, lambda x: np.sin(2 * np.pi * x) ** 3)
    a = besov.vmo_modulus(coarse, None, 16 / 1024)
    b = besov.vmo_modulus(fine, None, 16 / 1024)
    # the lattice ball over-weights its rim by about 3/(2m) with m = eps/h cells
    assert b < a
    assert (a - b) / b <= 1.5 / 16


def test_directional_modulus():
    assert besov.directional_modulus(constant_field(make_grid(1, [32]), 2.0), (3,)) == 0.0
    f = line_field(4096, lambda x: np.sin(2 * np.pi * x))
    shifts = [1, 2, 4, 8, 16]
    vals = [besov.directional_modulus(f, (s,)) for s in shifts]
    assert besov.scaling_fit(np.array(shifts) / 4096, vals)[0] >= 1.9
    with pytest.raises(ValueError):
        besov.directional_modulus(line_field(16, np.sin, periodic=False), (16,))
    with pytest.raises(ValueError):
        besov.directional_modulus(f, (0,))


def test_directional_bounded_restricts():
    f = line_field(8, lambda x: x, periodic=False)
    h = 1 / 8
    # 6 admissible points, each increment 2h
    assert besov.directional_modulus(f, (2,)) == pytest.approx(6 * h * (2 * h) ** 3 / (2 * h))


def test_fubini_ball_average():
    g = make_grid(2, [64, 64], periodic=[True, True])
    x, y = g.mesh()
    f = Field(g, (np.sin(2 * np.pi * x) * np.cos(4 * np.pi * y))[None], ("u",))
    eps = 5 / 64
    offs = besov.ball_offsets(g, eps, (0, 1))
    avg = np.mean([besov.structure_function(f, tuple(o)) for o in offs if np.any(o)])
    # include the zero offset with weight 1/count, then divide by eps
    avg = avg * (len(offs) - 1) / len(offs) / eps
    assert avg == pytest.approx(besov.vmo_modulus(f, None, eps), rel=0.05)


def test_group_moduli_triangle():
    g = make_grid(1, [512], periodic=[True])
    f = synth.holder_field(g, 0.5, n_components=3, seed=4)
    full = besov.vmo_modulus(f, None, 8 / 512)
    parts = besov.group_moduli(f, {"a": ["u0"], "b": ["u1", "u2"]}, None, 8 / 512)
    assert full <= 9 * sum(parts.values())


def test_scaling_fit_cases():
    eps = np.array([0.1, 0.05, 0.025, 0.0125])
    assert besov.scaling_fit(eps, eps ** 2) == pytest.approx((2.0, 1.0))
    assert besov.scaling_fit(eps, np.full(4, 3.0))[0] == pytest.approx(0.0, abs=1e-12)
    with pytest.warns(UserWarning, match="dropping 1"):
        slope, _ = besov.scaling_fit(np.append(eps, 0.006), np.append(eps ** 2, 0.0))
    assert slope == pytest.approx(2.0)
    with pytest.raises(ValueError):
        besov.scaling_fit(eps[:3], eps[:3])


def test_sweep_report_contract(tmp_path):
    rep = besov.SweepReport.from_values([0.01, 0.04, 0.02, 0.005], [1e-4, 1.6e-3, 4e-4, 2.5e-5], "core")
    assert rep.epsilons == (0.04, 0.02, 0.01, 0.005)
    assert rep.fitted_exponent == pytest.approx(2.0)
    assert rep.to_csv().splitlines()[0] == "epsilon,value"
    back = besov.SweepReport.from_csv(rep.to_csv(), "core")
    assert back == rep
    payload = json.loads(rep.to_json())
    assert set(payload) == {"epsilons", "values", "exponent", "r2", "region_label"}
    with pytest.raises(ValueError):
        besov.SweepReport((0.1, 0.2), (1.0, 1.0), None, None)
    with pytest.raises(ValueError):
        besov.SweepReport((0.2, 0.1), (1.0, -1.0), None, None)
    with warnings.catch_warnings(record=True) as w:
        warnings.simplefilter("always")
        zero = besov.SweepReport.from_values([0.2, 0.1], [0.0, 0.0])
    assert zero.fitted_exponent is None and w


@pytest.mark.parametrize("alpha,beta,criterion,expected", [
    (1 / 3, 1 / 3, "inhom-euler", False),
    (0.5, 0.1, "comp-euler", False),
    (0.4, 0.4, "mhd-caflisch", True),
    (1 / 3, 1 / 3, "mhd-kang-lee", True),
    (0.3, 0.5, "mhd-caflisch", False),
    (0.5, 0.3, "comp-euler", True),
])
def test_exponent_conditions(alpha, beta, criterion, expected):
    assert besov.exponent_condition_check(alpha, beta, criterion).satisfied is expected


def test_exponent_condition_margin_and_errors():
    assert besov.exponent_condition_check(1 / 3, 1 / 3, "inhom-euler").margin == pytest.approx(0, abs=1e-15)
    with pytest.raises(ValueError, match="unknown criterion"):
        besov.exponent_condition_check(0.5, 0.5, "navier")
    with pytest.raises(ValueError):
        besov.exponent_condition_check(1.5, 0.5, "inhom-euler")
