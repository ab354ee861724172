"""Connection matrices between the regular singular points z = 0 and z = 1.

Two independent routes:

* ``connection_matrix``: four q-limits of the three-term recurrence,
  C = diag(Γ(μ0)/Γ(1−μ0), 1)·[[q(μ0,−μ1), q(μ0,μ1)], [q(−μ0,−μ1), q(−μ0,μ1)]]·diag(1, Γ(μ1)/Γ(1−μ1)).
* ``frobenius_connection``: Frobenius series of y'' = Q_T y at both points,
  matched at z_match, C = Φ0 Φ1⁻¹ with Φ = [[y1', y1], [y2', y2]].

Row/column order at both points: first the branch z^ϑ, then z^{1−ϑ}
(CHE exponents 0 then μ). Only bc/ad is normalization independent.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import mpmath
import numpy as np

from . import numerics
from .che import SIGNS, from_trinoid, q_value, sign_label
from .errors import DomainError, PoleError, ReducibleError, TruncationError
from .params import TrinoidParams

EXPONENT_ORDER = "rows/cols: exponent theta_k branch first, then 1-theta_k (CHE exponents 0, mu_k)"


@dataclass
class ConnectionMatrix:
    a: complex
    b: complex
    c: complex
    d: complex
    method: str
    q_values: dict | None = None
    meta: dict = field(default_factory=dict)

    def as_array(self) -> np.ndarray:
        return np.array([[self.a, self.b], [self.c, self.d]], dtype=complex)

    @classmethod
    def from_array(cls, m, method="given", **kw):
        m = np.asarray(m)
        return cls(m[0, 0], m[0, 1], m[1, 0], m[1, 1], method, **kw)

    @property
    def ratio(self):
        return unitarisability_ratio(self)

    def to_json(self):
        def pair(z):
            z = complex(z)
            return [z.real, z.imag]

        out = {"a": pair(self.a), "b": pair(self.b), "c": pair(self.c), "d": pair(self.d),
               "method": self.method, "exponent_order": EXPONENT_ORDER}
        if self.q_values is not None:
            out["q_values"] = {k: float(v) for k, v in self.q_values.items()}
        out.update(self.meta)
        return out


def unitarisability_ratio(C: ConnectionMatrix) -> complex:
    """bc/ad; invariant under C -> D·C·D' for diagonal D, D'."""
    ad = C.a * C.d
    if ad == 0:
        raise ReducibleError("a·d = 0: reducible configuration")
    return C.b * C.c / ad


def is_irreducible(C: ConnectionMatrix, rel_tol: float = 1e3 * np.finfo(float).eps) -> bool:
    entries = [abs(complex(v)) for v in (C.a, C.b, C.c, C.d)]
    scale = max(entries)
    return scale > 0 and min(entries) > rel_tol * scale


def _check_nonresonant(mu, name):
    if abs(mu - round(float(mu))) == 0:
        raise PoleError(f"{name} = {mu} is an integer: Γ(μ)/Γ(1−μ) undefined")


def connection_matrix(theta: TrinoidParams, t, K: int = 5000, tol: float = 1e-9,
                      prec: int = numerics.DEFAULT_PREC) -> ConnectionMatrix:
    """Connection matrix from the four q-limits of the sign-flipped tuples."""
    if prec > numerics.DEFAULT_PREC:
        with mpmath.workprec(prec + 16):
            return _connection_matrix(theta, mpmath.mpf(t), K, tol, prec)
    return _connection_matrix(theta, float(t), K, tol, prec)


def _connection_matrix(theta, t, K, tol, prec):
    base = from_trinoid(theta, t, (1, 1))
    _check_nonresonant(base.mu0, "mu0")
    _check_nonresonant(base.mu1, "mu1")
    q = {}
    for signs in SIGNS:
        q[sign_label(signs)] = q_value(base.with_signs(*signs), K, tol, prec=prec)[0]
    g0 = numerics.gamma_real(base.mu0, prec) / numerics.gamma_real(1 - base.mu0, prec)
    g1 = numerics.gamma_real(base.mu1, prec) / numerics.gamma_real(1 - base.mu1, prec)
    return ConnectionMatrix(
        g0 * q["+-"], g0 * g1 * q["++"], q["--"], g1 * q["-+"],
        "asymptotic", q_values=q, meta={"t": float(t), "K": K},
    )


def _frobenius_series(lead_w, lead_r, other_w, other_r, a2, t, rho, other_at, n, num):
    """Coefficients e_k of y = s^ρ Σ e_k s^k for y'' = Q y, with Q expanded about
    a regular singular point and the other finite pole at s = ``other_at`` (±1)."""
    # Laurent coefficients Q_{-2}, Q_{-1}, Q_0, … of Q in s
    Q = [-lead_w * t / 4, lead_r * t]
    inv = num(1) / other_at
    for m in range(n):
        # 1/(s − σ) = −Σ s^m/σ^{m+1},  1/(s − σ)² = Σ (m+1) s^m/σ^{m+2}
        geo = -(inv ** (m + 1))
        geo2 = (m + 1) * inv ** (m + 2)
        Q.append(-other_w * t / 4 * geo2 + other_r * t * geo + (a2 if m == 0 else 0))
    e = [num(1)]
    for k in range(1, n):
        acc = num(0)
        for j in range(1, k + 1):
            acc += Q[j] * e[k - j]  # Q[j] is Q_{j−2}
        e.append(acc / ((k + rho) * (k + rho - 1) - Q[0]))
    return e


def frobenius_connection(theta: TrinoidParams, t, z_match=0.5, n: int = 80,
                         tol: float = 1e-12, prec: int = numerics.DEFAULT_PREC) -> ConnectionMatrix:
    """Connection matrix by matching Frobenius series of y'' = Q_T y at z_match."""
    if not 0 < z_match < 1:
        raise DomainError("z_match must lie in (0,1), inside both convergence disks")
    if prec > numerics.DEFAULT_PREC:
        with mpmath.workprec(prec + 16):
            return _frobenius_connection(theta, mpmath.mpf(t), mpmath.mpf(z_match), n, tol, mpmath.mpf)
    return _frobenius_connection(theta, float(t), float(z_match), n, tol, float)


def _frobenius_connection(theta, t, zm, n, tol, num):
    chi = from_trinoid(theta, t, (1, 1))
    _check_nonresonant(chi.mu0, "mu0")
    _check_nonresonant(chi.mu1, "mu1")
    conv = (lambda v: mpmath.mpf(v.numerator) / v.denominator if hasattr(v, "numerator") else mpmath.mpf(v)) \
        if num is mpmath.mpf else float
    w0, w1, r0h, r1h, p = (conv(v) for v in theta.astuple())
    a2 = p * p * t
    rows, tails = [], []
    for at_zero in (True, False):
        if at_zero:
            lead, other, s, sigma, th = (w0, r0h), (w1, r1h), zm, num(1), chi.theta0
        else:
            lead, other, s, sigma, th = (w1, r1h), (w0, r0h), zm - 1, num(-1), chi.theta1
        frame = []
        for rho in (th, 1 - th):
            e = _frobenius_series(lead[0], lead[1], other[0], other[1], a2, t, rho, sigma, n, num)
            powers = [s ** k for k in range(n)]
            val = sum(ek * pk for ek, pk in zip(e, powers))
            der = sum(k * e[k] * powers[k - 1] for k in range(1, n))
            # |s|^ρ instead of s^ρ: a constant rescaling of the basis element
            base = abs(s) ** rho
            dbase = rho * abs(s) ** (rho - 1) * (1 if s > 0 else -1)
            frame.append([dbase * val + base * der, base * val])
            tail = abs(e[-1] * powers[-1]) + abs(e[-2] * powers[-2])
            tails.append(float(tail / max(abs(val), 1e-300)))
        rows.append(frame)
    tail = max(tails)
    if tail > tol:
        raise TruncationError(f"Frobenius tail {tail:.2e} above {tol:.0e}; try n = {2 * n}",
                              suggested_n=2 * n)
    if num is float:
        phi0, phi1 = np.array(rows[0]), np.array(rows[1])
        C = phi0 @ np.linalg.inv(phi1)
    else:
        phi0, phi1 = mpmath.matrix(rows[0]), mpmath.matrix(rows[1])
        Cm = phi0 * phi1 ** -1
        C = [[Cm[0, 0], Cm[0, 1]], [Cm[1, 0], Cm[1, 1]]]
    wronskians = [float(abs(f[0][0] * f[1][1] - f[0][1] * f[1][0])) for f in rows]
    return ConnectionMatrix(C[0][0], C[0][1], C[1][0], C[1][1], "frobenius",
                            meta={"t": float(t), "z_match": float(zm), "n": n, "tail": tail,
                                  "wronskians": wronskians})


def simultaneously_unitarisable(theta: TrinoidParams, t, method: str = "asymptotic") -> bool:
    """Sign test of q(μ0,μ1)q(−μ0,−μ1) / (q(μ0,−μ1)q(−μ0,μ1)) with a 256-bit retry when marginal."""
    build = connection_matrix if method == "asymptotic" else frobenius_connection
    C = build(theta, t)
    if not is_irreducible(C):
        raise ReducibleError("a connection coefficient vanishes: monodromy reducible")
    r = complex(unitarisability_ratio(C))
    if numerics.is_marginal(r.real, 0.0, abs(r)) or not math.isfinite(r.real):
        C = build(theta, t, prec=numerics.HIGH_PREC)
        r = complex(unitarisability_ratio(C))
    return is_negative_real(r)


def is_negative_real(z: complex) -> bool:
    z = complex(z)
    return abs(z.imag) <= max(1e-10, 1e-8 * abs(z.real)) and z.real < 0
