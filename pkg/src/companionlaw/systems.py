"""Registry of conservation-law systems with their companion (entropy) laws.

Every system is written as ``d_t A(U) + div_x F(U) = 0`` with multiplier
``B(U)``, entropy ``eta(U)`` and entropy flux ``q(U)``.  All callables are
vectorised: a state array has the components on axis 0 and arbitrary trailing
sample axes.  Shapes (``n`` state components, ``m`` equations, ``k`` space dims):

    A: (m, ...)      F: (m, k, ...)      B: (m, ...)
    eta: (...)       q: (k, ...)
    dA: (m, n, ...)  dF: (m, k, n, ...)  deta: (n, ...)  dq: (k, n, ...)

Sign convention: fluxes enter with a plus sign, so for elastodynamics the
stress flux is ``-S`` and the entropy flux is ``q_j = -v_i S_ij``.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .grid import Field

NAMES = ("burgers", "incomp-euler", "inhom-incomp-euler", "comp-euler",
         "elasto", "incomp-mhd", "comp-mhd")

RHO_FLOOR = 0.5
ELASTO_C = 0.1


@dataclass(frozen=True)
class PolytropicPressure:
    """Pressure law ``p(rho) = kappa * rho**gamma`` and its pressure potential.

    The potential is ``P(rho) = rho * int_1^rho p(z) / z**2 dz``.
    """

    kappa: float = 1.0
    gamma: float = 2.0

    def p(self, rho):
        return self.kappa * rho ** self.gamma

    def dp(self, rho):
        return self.kappa * self.gamma * rho ** (self.gamma - 1.0)

    def P(self, rho):
        if self.gamma == 1.0:
            return self.kappa * rho * np.log(rho)
        return self.kappa * rho * (rho ** (self.gamma - 1.0) - 1.0) / (self.gamma - 1.0)

    def dP(self, rho):
        # rho P'(rho) = P(rho) + p(rho)
        return (self.P(rho) + self.p(rho)) / rho

    def describe(self) -> dict:
        return {"law": "polytropic", "kappa": self.kappa, "gamma": self.gamma}


@dataclass(frozen=True)
class SystemSpec:
    name: str
    n: int
    n_eq: int
    k: int
    component_names: tuple[str, ...]
    row_names: tuple[str, ...]
    sampling_box: tuple[tuple[float, float], ...]
    lower_bounds: dict
    affine_rows: tuple[int, ...]
    superlinear_B_rows: tuple[int, ...]
    A: Callable
    F: Callable
    B: Callable
    eta: Callable
    q: Callable
    dA: Callable
    dF: Callable
    deta: Callable
    dq: Callable
    pressure_law: PolytropicPressure | None = None
    reference_state: tuple[float, ...] = ()
    notes: tuple[str, ...] = ()

    def G(self, u):
        """Space-time flux with columns ``(A, F_1, ..., F_k)``, shape (m, k+1, ...)."""
        a = self.A(u)
        f = self.F(u)
        return np.concatenate([a[:, None], f], axis=1)

    def check_domain(self, u, where: str = "") -> None:
        """Raise ``ValueError`` naming the first component below its floor."""
        for name, lo in self.lower_bounds.items():
            c = self.component_names.index(name)
            bad = u[c] < lo
            if np.any(bad):
                idx = tuple(int(i) for i in np.argwhere(bad)[0])
                raise ValueError(
                    f"state-domain violation: component {name!r} = {u[c][idx]:.6g} "
                    f"< {lo} at grid index {idx}{where}")

    def describe(self) -> dict:
        out = {
            "name": self.name,
            "n": self.n,
            "n_equations": self.n_eq,
            "k": self.k,
            "components": list(self.component_names),
            "rows": list(self.row_names),
            "state_domain": {nm: list(b) for nm, b in zip(self.component_names, self.sampling_box)},
            "lower_bounds": dict(self.lower_bounds),
            "affine_rows": list(self.affine_rows),
            "superlinear_B_rows": list(self.superlinear_B_rows),
        }
        if self.pressure_law is not None:
            out["pressure_law"] = self.pressure_law.describe()
        if self.notes:
            out["notes"] = list(self.notes)
        return out


def _zeros(lead, u):
    return np.zeros(tuple(lead) + u.shape[1:])


def _ones(u):
    return np.ones(u.shape[1:])


def _sq(vecs):
    return sum(x * x for x in vecs)


# --------------------------------------------------------------------------- burgers


def _burgers() -> SystemSpec:
    def A(u):
        return u[:1].copy()

    def F(u):
        return (0.5 * u[0] ** 2)[None, None]

    def B(u):
        return u[:1].copy()

    def eta(u):
        return 0.5 * u[0] ** 2

    def q(u):
        return (u[0] ** 3 / 3.0)[None]

    def dA(u):
        return _ones(u)[None, None]

    def dF(u):
        return u[0][None, None, None].copy()

    def deta(u):
        return u[:1].copy()

    def dq(u):
        return (u[0] ** 2)[None, None]

    return SystemSpec(
        "burgers", 1, 1, 1, ("u",), ("u",), ((-2.0, 2.0),), {}, (), (),
        A, F, B, eta, q, dA, dF, deta, dq, reference_state=(0.0,),
        notes=("scalar Burgers law: a desk-scale oracle, not one of the physical systems",))


# --------------------------------------------------------------------------- incompressible Euler


def _incomp_euler(k: int) -> SystemSpec:
    n = k + 1

    def A(u):
        out = _zeros((n,), u)
        out[:k] = u[:k]
        return out

    def F(u):
        v, p = u[:k], u[k]
        out = _zeros((n, k), u)
        for i in range(k):
            for j in range(k):
                out[i, j] = v[i] * v[j] + (p if i == j else 0.0)
            out[k, i] = v[i]
        return out

    def B(u):
        v, p = u[:k], u[k]
        out = _zeros((n,), u)
        out[:k] = v
        out[k] = p - 0.5 * _sq(v)
        return out

    def eta(u):
        return 0.5 * _sq(u[:k])

    def q(u):
        v, p = u[:k], u[k]
        return (0.5 * _sq(v) + p) * v

    def dA(u):
        out = _zeros((n, n), u)
        for i in range(k):
            out[i, i] = 1.0
        return out

    def dF(u):
        v = u[:k]
        out = _zeros((n, k, n), u)
        for i in range(k):
            for j in range(k):
                for ll in range(k):
                    out[i, j, ll] = (v[j] if i == ll else 0.0) + (v[i] if j == ll else 0.0)
                out[i, j, k] = 1.0 if i == j else 0.0
            out[k, i, i] = 1.0
        return out

    def deta(u):
        out = _zeros((n,), u)
        out[:k] = u[:k]
        return out

    def dq(u):
        v, p = u[:k], u[k]
        e = 0.5 * _sq(v) + p
        out = _zeros((k, n), u)
        for j in range(k):
            for ll in range(k):
                out[j, ll] = v[ll] * v[j] + (e if j == ll else 0.0)
            out[j, k] = v[j]
        return out

    names = tuple(f"v{i + 1}" for i in range(k)) + ("p",)
    rows = tuple(f"momentum{i + 1}" for i in range(k)) + ("div_v",)
    box = ((-2.0, 2.0),) * k + ((-1.0, 1.0),)
    return SystemSpec("incomp-euler", n, n, k, names, rows, box, {}, (k,), (k,),
                      A, F, B, eta, q, dA, dF, deta, dq, reference_state=(0.0,) * n)


# --------------------------------------------------------------------------- inhomogeneous incompressible Euler


def _inhom_incomp_euler(k: int) -> SystemSpec:
    n = k + 2
    P_ = k + 1

    def A(u):
        out = _zeros((n,), u)
        out[:k + 1] = u[:k + 1]
        return out

    def F(u):
        rho, m, p = u[0], u[1:k + 1], u[P_]
        out = _zeros((n, k), u)
        for j in range(k):
            out[0, j] = m[j]
            for i in range(k):
                out[1 + i, j] = m[i] * m[j] / rho + (p if i == j else 0.0)
            out[P_, j] = m[j] / rho
        return out

    def B(u):
        rho, m, p = u[0], u[1:k + 1], u[P_]
        out = _zeros((n,), u)
        out[0] = -_sq(m) / (2 * rho ** 2)
        out[1:k + 1] = m / rho
        out[P_] = p
        return out

    def eta(u):
        return _sq(u[1:k + 1]) / (2 * u[0])

    def q(u):
        rho, m, p = u[0], u[1:k + 1], u[P_]
        return (_sq(m) / (2 * rho) + p) * m / rho

    def dA(u):
        out = _zeros((n, n), u)
        for i in range(k + 1):
            out[i, i] = 1.0
        return out

    def dF(u):
        rho, m = u[0], u[1:k + 1]
        out = _zeros((n, k, n), u)
        for j in range(k):
            out[0, j, 1 + j] = 1.0
            for i in range(k):
                out[1 + i, j, 0] = -m[i] * m[j] / rho ** 2
                for ll in range(k):
                    out[1 + i, j, 1 + ll] = ((m[j] if i == ll else 0.0) + (m[i] if j == ll else 0.0)) / rho
                out[1 + i, j, P_] = 1.0 if i == j else 0.0
            out[P_, j, 0] = -m[j] / rho ** 2
            out[P_, j, 1 + j] = 1.0 / rho
        return out

    def deta(u):
        rho, m = u[0], u[1:k + 1]
        out = _zeros((n,), u)
        out[0] = -_sq(m) / (2 * rho ** 2)
        out[1:k + 1] = m / rho
        return out

    def dq(u):
        rho, m, p = u[0], u[1:k + 1], u[P_]
        e = _sq(m) / (2 * rho) + p
        out = _zeros((k, n), u)
        for j in range(k):
            out[j, 0] = -_sq(m) / (2 * rho ** 2) * m[j] / rho - e * m[j] / rho ** 2
            for ll in range(k):
                out[j, 1 + ll] = m[ll] * m[j] / rho ** 2 + (e / rho if j == ll else 0.0)
            out[j, P_] = m[j] / rho
        return out

    names = ("rho",) + tuple(f"m{i + 1}" for i in range(k)) + ("p",)
    rows = ("mass",) + tuple(f"momentum{i + 1}" for i in range(k)) + ("div_v",)
    box = ((RHO_FLOOR, 2.0),) + ((-2.0, 2.0),) * k + ((-1.0, 1.0),)
    ref = (1.0,) + (0.0,) * (k + 1)
    return SystemSpec("inhom-incomp-euler", n, n, k, names, rows, box, {"rho": RHO_FLOOR},
                      (0,), (0,), A, F, B, eta, q, dA, dF, deta, dq, reference_state=ref)


# --------------------------------------------------------------------------- compressible Euler


def _comp_euler(k: int, law: PolytropicPressure) -> SystemSpec:
    n = k + 1

    def A(u):
        return u.copy()

    def F(u):
        rho, m = u[0], u[1:]
        p = law.p(rho)
        out = _zeros((n, k), u)
        for j in range(k):
            out[0, j] = m[j]
            for i in range(k):
                out[1 + i, j] = m[i] * m[j] / rho + (p if i == j else 0.0)
        return out

    def B(u):
        rho, m = u[0], u[1:]
        out = _zeros((n,), u)
        out[0] = law.dP(rho) - _sq(m) / (2 * rho ** 2)
        out[1:] = m / rho
        return out

    def eta(u):
        rho, m = u[0], u[1:]
        return _sq(m) / (2 * rho) + law.P(rho)

    def q(u):
        rho, m = u[0], u[1:]
        return (_sq(m) / (2 * rho) + law.P(rho) + law.p(rho)) * m / rho

    def dA(u):
        return np.broadcast_to(np.eye(n).reshape((n, n) + (1,) * (u.ndim - 1)),
                               (n, n) + u.shape[1:]).copy()

    def dF(u):
        rho, m = u[0], u[1:]
        dp = law.dp(rho)
        out = _zeros((n, k, n), u)
        for j in range(k):
            out[0, j, 1 + j] = 1.0
            for i in range(k):
                out[1 + i, j, 0] = -m[i] * m[j] / rho ** 2 + (dp if i == j else 0.0)
                for ll in range(k):
                    out[1 + i, j, 1 + ll] = ((m[j] if i == ll else 0.0) + (m[i] if j == ll else 0.0)) / rho
        return out

    def deta(u):
        rho, m = u[0], u[1:]
        out = _zeros((n,), u)
        out[0] = -_sq(m) / (2 * rho ** 2) + law.dP(rho)
        out[1:] = m / rho
        return out

    def dq(u):
        rho, m = u[0], u[1:]
        e = _sq(m) / (2 * rho) + law.P(rho) + law.p(rho)
        de = -_sq(m) / (2 * rho ** 2) + law.dP(rho) + law.dp(rho)
        out = _zeros((k, n), u)
        for j in range(k):
            out[j, 0] = de * m[j] / rho - e * m[j] / rho ** 2
            for ll in range(k):
                out[j, 1 + ll] = m[ll] * m[j] / rho ** 2 + (e / rho if j == ll else 0.0)
        return out

    names = ("rho",) + tuple(f"m{i + 1}" for i in range(k))
    rows = ("mass",) + tuple(f"momentum{i + 1}" for i in range(k))
    box = ((RHO_FLOOR, 2.0),) + ((-2.0, 2.0),) * k
    return SystemSpec(
        "comp-euler", n, n, k, names, rows, box, {"rho": RHO_FLOOR}, (0,), (0,),
        A, F, B, eta, q, dA, dF, deta, dq, pressure_law=law, reference_state=(1.0,) + (0.0,) * k,
        notes=("multiplier B_rho = P'(rho) - |m|^2/(2 rho^2); the '+' sign variant fails the "
               "compatibility check",))


# --------------------------------------------------------------------------- elastodynamics


def stored_energy(Fm, c=ELASTO_C):
    """``G(F) = |F|^2/2 + c * sum log(1 + F_ij^2)`` over the entries (axis 0)."""
    return np.sum(0.5 * Fm ** 2 + c * np.log1p(Fm ** 2), axis=0)


def _elasto(k: int, c: float = ELASTO_C) -> SystemSpec:
    n = k + k * k

    def S(Fm):
        return Fm + 2 * c * Fm / (1 + Fm ** 2)

    def dS(Fm):
        return 1 + 2 * c * (1 - Fm ** 2) / (1 + Fm ** 2) ** 2

    def fidx(a, b):
        return k + a * k + b

    def A(u):
        return u.copy()

    def F(u):
        v, s = u[:k], S(u[k:])
        out = _zeros((n, k), u)
        for i in range(k):
            for j in range(k):
                out[i, j] = -s[i * k + j]
        for a in range(k):
            for j in range(k):
                out[fidx(a, j), j] = -v[a]
        return out

    def B(u):
        out = u.copy()
        out[k:] = S(u[k:])
        return out

    def eta(u):
        return 0.5 * _sq(u[:k]) + stored_energy(u[k:], c)

    def q(u):
        v, s = u[:k], S(u[k:])
        out = _zeros((k,), u)
        for j in range(k):
            out[j] = -sum(v[i] * s[i * k + j] for i in range(k))
        return out

    def dA(u):
        return np.broadcast_to(np.eye(n).reshape((n, n) + (1,) * (u.ndim - 1)),
                               (n, n) + u.shape[1:]).copy()

    def dF(u):
        ds = dS(u[k:])
        out = _zeros((n, k, n), u)
        for i in range(k):
            for j in range(k):
                out[i, j, fidx(i, j)] = -ds[i * k + j]
        for a in range(k):
            for j in range(k):
                out[fidx(a, j), j, a] = -1.0
        return out

    def deta(u):
        return B(u)

    def dq(u):
        v, s, ds = u[:k], S(u[k:]), dS(u[k:])
        out = _zeros((k, n), u)
        for j in range(k):
            for ll in range(k):
                out[j, ll] = -s[ll * k + j]
            for a in range(k):
                out[j, fidx(a, j)] = -v[a] * ds[a * k + j]
        return out

    names = tuple(f"v{i + 1}" for i in range(k)) + tuple(
        f"F{a + 1}{b + 1}" for a in range(k) for b in range(k))
    rows = tuple(f"momentum{i + 1}" for i in range(k)) + tuple(
        f"compat{a + 1}{b + 1}" for a in range(k) for b in range(k))
    ref = (0.0,) * k + tuple(float(a == b) for a in range(k) for b in range(k))
    return SystemSpec(
        "elasto", n, n, k, names, rows, ((-2.0, 2.0),) * n, {}, tuple(range(k, n)), (),
        A, F, B, eta, q, dA, dF, deta, dq, reference_state=ref,
        notes=(f"stored energy |F|^2/2 + {c} * sum log(1 + F_ij^2)",
               "fluxes carry a minus sign: d_t v - div S = 0 is written d_t v + div(-S) = 0"))


# --------------------------------------------------------------------------- incompressible MHD


def _incomp_mhd(k: int) -> SystemSpec:
    n = 2 * k + 1
    m_eq = 2 * k + 2
    P_, DV, DH = 2 * k, 2 * k, 2 * k + 1

    def A(u):
        out = _zeros((m_eq,), u)
        out[:2 * k] = u[:2 * k]
        return out

    def F(u):
        v, h, p = u[:k], u[k:2 * k], u[P_]
        ptot = p + 0.5 * _sq(h)
        out = _zeros((m_eq, k), u)
        for i in range(k):
            for j in range(k):
                out[i, j] = v[i] * v[j] - h[i] * h[j] + (ptot if i == j else 0.0)
                out[k + i, j] = v[j] * h[i] - h[j] * v[i]
        for j in range(k):
            out[DV, j] = v[j]
            out[DH, j] = h[j]
        return out

    def B(u):
        v, h, p = u[:k], u[k:2 * k], u[P_]
        out = _zeros((m_eq,), u)
        out[:2 * k] = u[:2 * k]
        out[DV] = p - 0.5 * _sq(v)
        out[DH] = sum(v[i] * h[i] for i in range(k))
        return out

    def eta(u):
        return 0.5 * (_sq(u[:k]) + _sq(u[k:2 * k]))

    def q(u):
        v, h, p = u[:k], u[k:2 * k], u[P_]
        vh = sum(v[i] * h[i] for i in range(k))
        return (0.5 * _sq(v) + _sq(h) + p) * v - vh * h

    def dA(u):
        out = _zeros((m_eq, n), u)
        for i in range(2 * k):
            out[i, i] = 1.0
        return out

    def dF(u):
        v, h = u[:k], u[k:2 * k]
        out = _zeros((m_eq, k, n), u)
        d = np.eye(k)
        for i in range(k):
            for j in range(k):
                for ll in range(k):
                    out[i, j, ll] = d[i, ll] * v[j] + v[i] * d[j, ll]
                    out[i, j, k + ll] = -d[i, ll] * h[j] - h[i] * d[j, ll] + h[ll] * d[i, j]
                    out[k + i, j, ll] = d[j, ll] * h[i] - h[j] * d[i, ll]
                    out[k + i, j, k + ll] = v[j] * d[i, ll] - d[j, ll] * v[i]
                out[i, j, P_] = d[i, j]
        for j in range(k):
            out[DV, j, j] = 1.0
            out[DH, j, k + j] = 1.0
        return out

    def deta(u):
        out = _zeros((n,), u)
        out[:2 * k] = u[:2 * k]
        return out

    def dq(u):
        v, h, p = u[:k], u[k:2 * k], u[P_]
        vh = sum(v[i] * h[i] for i in range(k))
        e = 0.5 * _sq(v) + _sq(h) + p
        out = _zeros((k, n), u)
        for j in range(k):
            for ll in range(k):
                out[j, ll] = v[ll] * v[j] + (e if j == ll else 0.0) - h[ll] * h[j]
                out[j, k + ll] = 2 * h[ll] * v[j] - v[ll] * h[j] - (vh if j == ll else 0.0)
            out[j, P_] = v[j]
        return out

    names = (tuple(f"v{i + 1}" for i in range(k)) + tuple(f"h{i + 1}" for i in range(k)) + ("p",))
    rows = (tuple(f"momentum{i + 1}" for i in range(k)) + tuple(f"induction{i + 1}" for i in range(k))
            + ("div_v", "div_h"))
    box = ((-2.0, 2.0),) * (2 * k) + ((-1.0, 1.0),)
    return SystemSpec(
        "incomp-mhd", n, m_eq, k, names, rows, box, {}, (DV, DH), (DV, DH),
        A, F, B, eta, q, dA, dF, deta, dq, reference_state=(0.0,) * n,
        notes=("entropy flux (|v|^2/2 + |h|^2 + p) v - (v.h) h",
               "div h = 0 kept as an explicit equation with multiplier v.h"))


# --------------------------------------------------------------------------- compressible MHD


def _comp_mhd(k: int, law: PolytropicPressure) -> SystemSpec:
    n = 2 * k + 1
    m_eq = 2 * k + 2
    DH = 2 * k + 1

    def split(u):
        return u[0], u[1:k + 1], u[k + 1:2 * k + 1]

    def A(u):
        out = _zeros((m_eq,), u)
        out[:n] = u
        return out

    def F(u):
        rho, m, h = split(u)
        ptot = law.p(rho) + 0.5 * _sq(h)
        out = _zeros((m_eq, k), u)
        for j in range(k):
            out[0, j] = m[j]
            for i in range(k):
                out[1 + i, j] = m[i] * m[j] / rho + (ptot if i == j else 0.0) - h[i] * h[j]
                out[1 + k + i, j] = (m[j] * h[i] - h[j] * m[i]) / rho
            out[DH, j] = h[j]
        return out

    def B(u):
        rho, m, h = split(u)
        out = _zeros((m_eq,), u)
        out[0] = law.dP(rho) - _sq(m) / (2 * rho ** 2)
        out[1:k + 1] = m / rho
        out[k + 1:2 * k + 1] = h
        out[DH] = sum(m[i] * h[i] for i in range(k)) / rho
        return out

    def eta(u):
        rho, m, h = split(u)
        return _sq(m) / (2 * rho) + law.P(rho) + 0.5 * _sq(h)

    def q(u):
        rho, m, h = split(u)
        e = _sq(m) / (2 * rho) + law.P(rho) + law.p(rho) + _sq(h)
        mh = sum(m[i] * h[i] for i in range(k))
        return e * m / rho - mh * h / rho

    def dA(u):
        out = _zeros((m_eq, n), u)
        for i in range(n):
            out[i, i] = 1.0
        return out

    def dF(u):
        rho, m, h = split(u)
        dp = law.dp(rho)
        d = np.eye(k)
        out = _zeros((m_eq, k, n), u)
        for j in range(k):
            out[0, j, 1 + j] = 1.0
            for i in range(k):
                r, s = 1 + i, 1 + k + i
                out[r, j, 0] = -m[i] * m[j] / rho ** 2 + dp * d[i, j]
                out[s, j, 0] = -(m[j] * h[i] - h[j] * m[i]) / rho ** 2
                for ll in range(k):
                    out[r, j, 1 + ll] = (d[i, ll] * m[j] + m[i] * d[j, ll]) / rho
                    out[r, j, 1 + k + ll] = h[ll] * d[i, j] - d[i, ll] * h[j] - h[i] * d[j, ll]
                    out[s, j, 1 + ll] = (d[j, ll] * h[i] - h[j] * d[i, ll]) / rho
                    out[s, j, 1 + k + ll] = (m[j] * d[i, ll] - d[j, ll] * m[i]) / rho
            out[DH, j, 1 + k + j] = 1.0
        return out

    def deta(u):
        rho, m, h = split(u)
        out = _zeros((n,), u)
        out[0] = law.dP(rho) - _sq(m) / (2 * rho ** 2)
        out[1:k + 1] = m / rho
        out[k + 1:] = h
        return out

    def dq(u):
        rho, m, h = split(u)
        e = _sq(m) / (2 * rho) + law.P(rho) + law.p(rho) + _sq(h)
        de = -_sq(m) / (2 * rho ** 2) + law.dP(rho) + law.dp(rho)
        mh = sum(m[i] * h[i] for i in range(k))
        out = _zeros((k, n), u)
        for j in range(k):
            out[j, 0] = de * m[j] / rho - e * m[j] / rho ** 2 + mh * h[j] / rho ** 2
            for ll in range(k):
                out[j, 1 + ll] = m[ll] * m[j] / rho ** 2 + (e / rho if j == ll else 0.0) - h[ll] * h[j] / rho
                out[j, 1 + k + ll] = (2 * h[ll] * m[j] - m[ll] * h[j] - (mh if j == ll else 0.0)) / rho
        return out

    names = (("rho",) + tuple(f"m{i + 1}" for i in range(k)) + tuple(f"h{i + 1}" for i in range(k)))
    rows = (("mass",) + tuple(f"momentum{i + 1}" for i in range(k))
            + tuple(f"induction{i + 1}" for i in range(k)) + ("div_h",))
    box = ((RHO_FLOOR, 2.0),) + ((-2.0, 2.0),) * (2 * k)
    ref = (1.0,) + (0.0,) * (2 * k)
    return SystemSpec(
        "comp-mhd", n, m_eq, k, names, rows, box, {"rho": RHO_FLOOR}, (0, DH), (0, DH),
        A, F, B, eta, q, dA, dF, deta, dq, pressure_law=law, reference_state=ref,
        notes=("div h = 0 kept as an explicit equation with multiplier (m.h)/rho",))


DEFAULT_K = {"burgers": 1}


def register_system(name: str, k: int | None = None, pressure_law: PolytropicPressure | None = None,
                    ) -> SystemSpec:
    """Look up a system by name.

    ``k`` defaults to 3 for the physical systems and 1 for Burgers.  The
    compressible systems need an explicit ``pressure_law``.
    """
    if name not in NAMES:
        raise ValueError(f"unknown system {name!r}; choose from {', '.join(NAMES)}")
    k = DEFAULT_K.get(name, 3) if k is None else int(k)
    if name == "burgers":
        if k != 1:
            raise ValueError("burgers is one-dimensional")
        return _burgers()
    if k not in (1, 2, 3):
        raise ValueError(f"k must be 1, 2 or 3, got {k}")
    if name in ("comp-euler", "comp-mhd") and pressure_law is None:
        raise ValueError(f"{name} needs a pressure law")
    if name == "incomp-euler":
        return _incomp_euler(k)
    if name == "inhom-incomp-euler":
        return _inhom_incomp_euler(k)
    if name == "comp-euler":
        return _comp_euler(k, pressure_law)
    if name == "elasto":
        return _elasto(k)
    if name == "incomp-mhd":
        return _incomp_mhd(k)
    return _comp_mhd(k, pressure_law)


# --------------------------------------------------------------------------- incompatible variants


def incompatible_variant(name: str, k: int = 3) -> SystemSpec:
    """Plausible but wrong formulas, kept to show that the compatibility check rejects them.

    * ``comp-euler``: multiplier ``B_rho = P'(rho) + |m|^2/(2 rho^2)``.
    * ``incomp-mhd``: entropy flux ``(|v|^2+|h|^2)/2 v - (v.h) h`` with the
      three-block multiplier ``(v, h, p - |v|^2/2)`` and no ``div h`` row.
    * ``incomp-euler-dropped``: multiplier ``(v, p)`` (the ``-|v|^2/2`` term removed).
    """
    if name == "comp-euler":
        base = _comp_euler(k, PolytropicPressure())
        law = base.pressure_law

        def B(u):
            out = base.B(u)
            out[0] = law.dP(u[0]) + _sq(u[1:]) / (2 * u[0] ** 2)
            return out

        return dataclasses.replace(base, name="comp-euler(incompatible)", B=B)
    if name == "incomp-mhd":
        base = _incomp_mhd(k)
        last = base.n_eq - 1

        def q(u):
            v, h = u[:k], u[k:2 * k]
            vh = sum(v[i] * h[i] for i in range(k))
            return 0.5 * (_sq(v) + _sq(h)) * v - vh * h

        def dq(u):
            v, h = u[:k], u[k:2 * k]
            vh = sum(v[i] * h[i] for i in range(k))
            e = 0.5 * (_sq(v) + _sq(h))
            out = _zeros((k, base.n), u)
            for j in range(k):
                for ll in range(k):
                    out[j, ll] = v[ll] * v[j] + (e if j == ll else 0.0) - h[ll] * h[j]
                    out[j, k + ll] = h[ll] * v[j] - v[ll] * h[j] - (vh if j == ll else 0.0)
            return out

        return dataclasses.replace(
            base, name="incomp-mhd(incompatible)", n_eq=last, row_names=base.row_names[:last],
            affine_rows=(last - 1,), superlinear_B_rows=(last - 1,),
            A=lambda u: base.A(u)[:last], F=lambda u: base.F(u)[:last],
            B=lambda u: base.B(u)[:last], dA=lambda u: base.dA(u)[:last],
            dF=lambda u: base.dF(u)[:last], q=q, dq=dq)
    if name == "incomp-euler-dropped":
        base = _incomp_euler(k)

        def B(u):
            out = base.B(u)
            out[k] = u[k]
            return out

        return dataclasses.replace(base, name="incomp-euler(dropped)", B=B)
    raise ValueError(f"no incompatible variant for {name!r}")


# --------------------------------------------------------------------------- checks and evaluation


@dataclass
class CompatibilityReport:
    system: str
    n_samples: int
    max_eta_residual: float
    max_flux_residual: tuple[float, ...]
    max_jacobian_rel_error: float

    @property
    def max_residual(self) -> float:
        return max((self.max_eta_residual,) + tuple(self.max_flux_residual))

    def as_dict(self) -> dict:
        return {"system": self.system, "samples": self.n_samples,
                "max_residual": self.max_residual,
                "eta_residual": self.max_eta_residual,
                "flux_residuals": list(self.max_flux_residual),
                "jacobian_rel_error": self.max_jacobian_rel_error}


def sample_states(system: SystemSpec, n_samples: int, seed) -> np.ndarray:
    """Uniform samples from the system's state box, shape (n, n_samples)."""
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    lo = np.array([b[0] for b in system.sampling_box])
    hi = np.array([b[1] for b in system.sampling_box])
    if np.any(hi <= lo):
        raise ValueError("degenerate state domain")
    rng = np.random.default_rng(seed)
    u = lo[:, None] + (hi - lo)[:, None] * rng.random((system.n, n_samples))
    system.check_domain(u)
    return u


def _fd_jacobian(fun, u, h):
    """Central-difference Jacobian of a vectorised map; new axis before the samples."""
    cols = []
    for ll in range(u.shape[0]):
        up, um = u.copy(), u.copy()
        up[ll] += h[ll]
        um[ll] -= h[ll]
        cols.append((fun(up) - fun(um)) / (2 * h[ll]))
    return np.stack(cols, axis=-2)


def check_compatibility(system: SystemSpec, n_samples: int = 100, seed=0) -> CompatibilityReport:
    """Residuals of ``D eta = B DA`` and ``D q_j = B DF_j`` at random states.

    Also compares every analytic Jacobian against central finite differences.
    """
    u = sample_states(system, n_samples, seed)
    b = system.B(u)
    da, df = system.dA(u), system.dF(u)
    r_eta = np.abs(system.deta(u) - np.einsum("rs,rls->ls", b, da))
    dq = system.dq(u)
    r_flux = np.abs(dq - np.einsum("rs,rjls->jls", b, df))

    scale = np.maximum(1.0, np.abs(u))
    h = 1e-5 * scale
    worst = 0.0
    pairs = [(system.A, da), (system.F, df), (system.eta, system.deta(u)), (system.q, dq)]
    for fun, analytic in pairs:
        for s in range(n_samples):
            fd = _fd_jacobian(fun, u[:, s:s + 1], h[:, s])[..., 0]
            an = analytic[..., s]
            err = np.max(np.abs(fd - an)) / max(1.0, np.max(np.abs(an)))
            worst = max(worst, float(err))
    return CompatibilityReport(system.name, n_samples, float(r_eta.max()),
                               tuple(float(r_flux[j].max()) for j in range(system.k)), worst)


SELECTORS = ("A", "F", "B", "eta", "q", "G")


def evaluate(system: SystemSpec, field: Field, which: str) -> Field:
    """Apply one of the system maps pointwise to a field."""
    if which not in SELECTORS:
        raise ValueError(f"selector must be one of {SELECTORS}, got {which!r}")
    if field.n_components != system.n:
        raise ValueError(f"{system.name} expects {system.n} components, field has {field.n_components}")
    u = field.values
    system.check_domain(u)
    out = getattr(system, which)(u)
    if which == "eta":
        out = out[None]
    names = flux_names(system, which)
    return Field(field.grid, out.reshape((-1,) + field.grid.shape), names, field.window)


def flux_names(system: SystemSpec, which: str) -> tuple[str, ...]:
    cols = ("t",) + tuple(f"x{j + 1}" for j in range(system.k))
    if which in ("A", "B"):
        return tuple(f"{which}[{r}]" for r in system.row_names)
    if which == "eta":
        return ("eta",)
    if which == "q":
        return tuple(f"q{j + 1}" for j in range(system.k))
    if which == "F":
        return tuple(f"F[{r}][{c}]" for r in system.row_names for c in cols[1:])
    return tuple(f"G[{r}][{c}]" for r in system.row_names for c in cols)
