"""Trinoid potential ξ_T = [[0, λ⁻¹], [λ Q_T, 0]] dz, its loop monodromies on
the spectral circle, the θ-expansion of the big-circle monodromy, and end weights.

    Q_T = t(−w0/4z² − w1/4(z−1)² + r̂0/z + r̂1/(z−1) + p²),  t = −¼λ⁻¹(λ−1)² = sin²(θ/2).

Conventions: base point z = 2, left solutions dΦ = Φξ with Φ(2) = 1, and the
monodromy of a loop is the transport T with Φ(end) = Φ(start)·T. Running γ
first and then γ' gives T_γ·T_γ'.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath
import numpy as np

from .errors import PoleError
from .numerics import Circle, Composite, Segment, integrate_transport
from .params import TrinoidParams, fmt_rational

BASE_POINT = 2.0
LOOP_RADIUS = 0.25


@dataclass(frozen=True)
class SpectralPoint:
    theta: float
    lam: complex
    t: float


def spectral_point(theta: float) -> SpectralPoint:
    return SpectralPoint(theta, cmath.exp(1j * theta), math.sin(theta / 2) ** 2)


def spectral_t(lam: complex) -> complex:
    return -0.25 * (lam - 1) ** 2 / lam


def q_potential(theta: TrinoidParams, t, z):
    """Q_T(z); exact when t, z and Θ are rational."""
    if z == 0 or z == 1:
        raise PoleError(f"Q_T has a pole at z = {z}")
    w0, w1, r0h, r1h, p = theta.astuple()
    if isinstance(z, complex) or isinstance(t, complex) or not theta.is_exact:
        w0, w1, r0h, r1h, p = (float(v) for v in (w0, w1, r0h, r1h, p))
    return t * (-w0 / (4 * z * z) - w1 / (4 * (z - 1) ** 2) + r0h / z + r1h / (z - 1) + p * p)


def potential_matrix(theta: TrinoidParams, lam: complex, z: complex) -> np.ndarray:
    t = spectral_t(lam)
    return np.array([[0, 1 / lam], [lam * q_potential(theta, t, complex(z)), 0]], dtype=complex)


def _coeff(theta: TrinoidParams, lam: complex):
    lam = complex(lam)
    t = spectral_t(lam)
    w0, w1, r0h, r1h, p = (float(v) for v in theta.astuple())
    inv = 1 / lam

    def coeff(z):
        q = t * (-w0 / (4 * z * z) - w1 / (4 * (z - 1) ** 2) + r0h / z + r1h / (z - 1) + p * p)
        return np.array([[0, inv], [lam * q, 0]])

    return coeff


def loop_path(around) -> Composite:
    """Closed loop based at z = 2: around 0, around 1, or the circle |z| = 2 ("inf")."""
    if around in (1, "1"):
        go = Segment(BASE_POINT, 1 + LOOP_RADIUS)
        return Composite([go, Circle(1.0, LOOP_RADIUS, 0.0), go.reversed()])
    if around in (0, "0"):
        # pass above z = 1 (distance ≥ 0.3) and enter the circle radially at angle π/4
        corner = 0.5 + 0.5j
        entry = LOOP_RADIUS * cmath.exp(0.25j * math.pi)
        go = [Segment(BASE_POINT, corner), Segment(corner, entry)]
        back = [s.reversed() for s in reversed(go)]
        return Composite(go + [Circle(0.0, LOOP_RADIUS, 0.25 * math.pi)] + back)
    if around in ("inf", math.inf):
        return Composite([Circle(0.0, BASE_POINT, 0.0)])
    raise ValueError(f"unknown loop {around!r}")


def loop_transport(theta: TrinoidParams, lam: complex, loop, tol: float = 1e-12):
    path = loop if isinstance(loop, Composite) else loop_path(loop)
    return integrate_transport(_coeff(theta, lam), path, tol)


def loop_monodromy(theta: TrinoidParams, lam: complex, loop, tol: float = 1e-12) -> np.ndarray:
    return loop_transport(theta, lam, loop, tol).matrix


def loop_report(theta: TrinoidParams, lam: complex, loop, tol: float = 1e-12) -> dict:
    res = loop_transport(theta, lam, loop, tol)
    m = res.matrix
    tr = complex(np.trace(m))
    return {
        "loop": str(loop), "lambda": [lam.real, lam.imag], "t": float(spectral_t(lam).real),
        "matrix": [[[complex(v).real, complex(v).imag] for v in row] for row in m],
        "det_residual": abs(complex(np.linalg.det(m)) - 1), "trace": [tr.real, tr.imag],
        "trace_imag_residual": abs(tr.imag), "est_error": res.est_error, "steps": res.steps,
    }


# ---------------------------------------------------------------- θ-series


@dataclass(frozen=True)
class LaurentTail:
    """z^{-1}, z^{-2}, z^{-3} coefficients of Q_T/t on |z| > 1."""

    a_m1: object
    a_m2: object
    a_m3: object

    def astuple(self):
        return (self.a_m1, self.a_m2, self.a_m3)


def laurent_tail(theta: TrinoidParams) -> LaurentTail:
    w0, w1, r0h, r1h, _ = theta.astuple()
    return LaurentTail(r0h + r1h, r1h - (w0 + w1) / 4, r1h - w1 / 2)


def m2_closed_form(tail: LaurentTail):
    """Rational matrix R with M2 = 2πi·R."""
    a1, a2, a3 = tail.astuple()
    return [[a2 / 4 - a1 / 2, a2 - a1 - a3 / 4], [a1 / 4, a1 / 2 - a2 / 4]]


@dataclass
class SeriesCheck:
    dtheta: float
    m0: np.ndarray
    m1: np.ndarray
    m2: np.ndarray
    m2_closed: np.ndarray
    m0_error: float
    m1_norm: float
    m2_error: float
    samples: dict = field(default_factory=dict)

    def to_json(self):
        def mat(m):
            return [[[complex(v).real, complex(v).imag] for v in row] for row in m]

        return {"dtheta": self.dtheta, "m0": mat(self.m0), "m1": mat(self.m1), "m2": mat(self.m2),
                "m2_closed": mat(self.m2_closed), "m0_error": self.m0_error,
                "m1_norm": self.m1_norm, "m2_error": self.m2_error}


def _d1(f, h):
    return (f[-2 * h] - 8 * f[-h] + 8 * f[h] - f[2 * h]) / (12 * h)


def _d2(f, h):
    return (-f[-2 * h] + 16 * f[-h] - 30 * f[0] + 16 * f[h] - f[2 * h]) / (12 * h * h)


def m2_check(theta: TrinoidParams, dtheta: float = 0.05, tol: float = 1e-13) -> SeriesCheck:
    """Compare M(θ) = M0 + M1θ + M2θ² + … on |z| = 2 with M0 = 1, M1 = 0 and the
    closed form M2. Five point central differences at dtheta and dtheta/2,
    combined by one Richardson step."""
    h = dtheta
    nodes = sorted({0.0, h / 2, -h / 2, h, -h, 2 * h, -2 * h})
    path = loop_path("inf")
    f = {x: loop_monodromy(theta, cmath.exp(1j * x), path, tol) for x in nodes}
    f[0] = f[0.0]
    d1 = (16 * _d1(f, h / 2) - _d1(f, h)) / 15
    d2 = (16 * _d2(f, h / 2) - _d2(f, h)) / 15
    m0 = f[0.0]
    m2 = d2 / 2
    closed = 2j * math.pi * np.array(m2_closed_form(laurent_tail(theta)), dtype=float)
    return SeriesCheck(
        dtheta, m0, d1, m2, closed,
        m0_error=float(np.max(np.abs(m0 - np.eye(2)))),
        m1_norm=float(np.linalg.norm(d1, 2)),
        m2_error=float(np.max(np.abs(m2 - closed))),
        samples={x: f[x] for x in nodes},
    )


# ---------------------------------------------------------------- weights


def _is_square(q: Fraction):
    q = Fraction(q)
    if q < 0:
        return None
    n, d = math.isqrt(q.numerator), math.isqrt(q.denominator)
    if n * n == q.numerator and d * d == q.denominator:
        return Fraction(n, d)
    return None


@dataclass
class WeightReport:
    w0: object
    w1: object
    radicand: object          # R with w_inf = (π/8)√R
    w_inf: float | None
    w_inf_over_pi: Fraction | None  # exact when R is a rational square
    identity_holds: bool      # R == 16(a_m2² − a_m1 a_m3)
    balancing: list
    flags: list

    @property
    def balanced(self) -> bool:
        return all(b["pass"] for b in self.balancing)

    def to_json(self):
        return {
            "w0": fmt_rational(self.w0), "w1": fmt_rational(self.w1),
            "radicand": fmt_rational(self.radicand), "w_inf": self.w_inf,
            "w_inf_over_pi": None if self.w_inf_over_pi is None else fmt_rational(self.w_inf_over_pi),
            "identity_holds": self.identity_holds, "balancing": self.balancing,
            "balanced": self.balanced, "flags": self.flags,
        }


def weight_radicand(w0, w1, r0h, r1h):
    return (w0 + w1) ** 2 + 8 * r0h * (w1 - 2 * r1h) - 8 * r1h * w0


def end_weights(theta: TrinoidParams) -> WeightReport:
    """Weights w0, w1 and w_inf = (π/8)√((w0+w1)² + 8r̂0(w1−2r̂1) − 8r̂1w0) with the
    three triangle inequalities |w_i| ≤ |w_j| + |w_k|."""
    w0, w1, r0h, r1h, _ = theta.astuple()
    R = weight_radicand(w0, w1, r0h, r1h)
    tail = laurent_tail(theta)
    identity = R == 16 * (tail.a_m2 ** 2 - tail.a_m1 * tail.a_m3)
    flags = []
    exact = None
    if R < 0:
        flags.append("negative radicand: w_inf not real")
        w_inf = None
    else:
        if theta.is_exact:
            root = _is_square(R)
            exact = None if root is None else root / 8
        w_inf = math.pi / 8 * math.sqrt(float(R))
    balancing = []
    if w_inf is not None:
        with mpmath.workdps(40):
            to_mp = (lambda v: mpmath.mpf(v.numerator) / v.denominator) if theta.is_exact else mpmath.mpf
            winf_mp = mpmath.pi / 8 * mpmath.sqrt(to_mp(R))
            ws = {"w0": abs(to_mp(w0)), "w1": abs(to_mp(w1)), "w_inf": winf_mp}
            for i, j, k in (("w0", "w1", "w_inf"), ("w1", "w0", "w_inf"), ("w_inf", "w0", "w1")):
                lhs, rhs = ws[i], ws[j] + ws[k]
                balancing.append({"check": f"|{i}| <= |{j}| + |{k}|", "lhs": float(lhs),
                                  "rhs": float(rhs), "pass": bool(lhs <= rhs + mpmath.mpf(10) ** -30)})
    return WeightReport(w0, w1, R, w_inf, exact, identity, balancing, flags)
