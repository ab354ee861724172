"""Confluent Heun equation

    y'' + (2a + (1−μ0)/z + (1−μ1)/(z−1)) y' + (zA + B)/(z(z−1)) y = 0,
    A = a(2−μ0−μ1) − (r0+r1),  B = ½(μ0μ1 − 2a(1−μ0) − (μ0+μ1) + 2r0 + 1),

its power series at z = 0 through the three-term recurrence
U(k)c_{k+1} = V(k)c_k + W(k)c_{k−1}, and the limit

    q(μ0, μ1) = Γ(1−μ0)Γ(1−μ1) lim_k Γ(k+1)/Γ(k−μ1) c_k.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from fractions import Fraction
from numbers import Rational

import mpmath

from . import numerics
from .errors import ConvergenceError, DomainError, PoleError, ResonanceError, SignAssumptionError
from .params import TrinoidParams, fmt_rational

SIGNS = ((1, 1), (1, -1), (-1, 1), (-1, -1))


def sign_label(signs) -> str:
    return "".join("+" if s > 0 else "-" for s in signs)


@dataclass(frozen=True)
class CheParams:
    """χ = (μ0, μ1, r0, r1, a)."""

    mu0: object
    mu1: object
    r0: object
    r1: object
    a: object

    @property
    def theta0(self):
        return (1 - self.mu0) / 2

    @property
    def theta1(self):
        return (1 - self.mu1) / 2

    @property
    def is_exact(self) -> bool:
        return all(isinstance(v, Rational) for v in self.astuple())

    def astuple(self):
        return (self.mu0, self.mu1, self.r0, self.r1, self.a)

    def with_signs(self, s0: int, s1: int) -> "CheParams":
        return replace(self, mu0=s0 * self.mu0, mu1=s1 * self.mu1)

    def mirrored(self) -> "CheParams":
        """Parameters of the same equation in the variable s = 1 − z."""
        return CheParams(self.mu1, self.mu0, -self.r1, -self.r0, -self.a)

    def to_json(self):
        mode = "exact" if self.is_exact else "float"
        out = {k: fmt_rational(v) for k, v in zip(("mu0", "mu1", "r0", "r1", "a"), self.astuple())}
        out["mode"] = mode
        return out


def recurrence_terms(chi: CheParams, k: int):
    mu0, mu1, r0, r1, a = chi.astuple()
    U = (1 + k) * (1 + k - mu0)
    V = k * (k + 1 - 2 * a - mu0 - mu1) + (mu0 - 1) * (mu1 - 1) / 2 + a * (mu0 - 1) + r0
    W = a * (2 * k - mu0 - mu1) - (r0 + r1)
    return U, V, W


@dataclass
class CoeffSeq:
    values: list
    exact: bool

    def __getitem__(self, k):
        if k == -1:
            return 0
        return self.values[k]

    def __len__(self):
        return len(self.values)


def coefficients(chi: CheParams, n: int) -> CoeffSeq:
    """c_0..c_n with c_{−1} = 0, c_0 = 1."""
    exact = chi.is_exact
    if exact:
        chi = CheParams(*(Fraction(v) for v in chi.astuple()))
    prev, cur = 0, (Fraction(1) if exact else 1.0)
    out = [cur]
    for k in range(n):
        U, V, W = recurrence_terms(chi, k)
        if U == 0:
            raise ResonanceError(k)
        prev, cur = cur, (V * cur + W * prev) / U
        out.append(cur)
    return CoeffSeq(out, exact)


def _upper_root(lin, const):
    """Largest real root of k² + lin·k + const, or −1 when there is none."""
    disc = float(lin * lin - 4 * const)
    if disc < 0:
        return -1.0
    return (-float(lin) + math.sqrt(disc)) / 2


def positivity_threshold(chi: CheParams) -> int:
    """m(χ): least k0 ≥ 0 with U(k), V(k), W(k) > 0 for every k ≥ k0.

    The root structure in k gives an upper bound beyond which all three are
    increasing and positive; the bound is then walked down with direct
    (exact, when χ is rational) evaluation."""
    mu0, mu1, r0, r1, a = chi.astuple()
    if not a > 0:
        raise DomainError("positivity threshold needs a > 0 (W is not eventually positive)")
    lin_v = 1 - 2 * a - mu0 - mu1
    const_v = (mu0 - 1) * (mu1 - 1) / 2 + a * (mu0 - 1) + r0
    bounds = [
        math.floor(float(mu0)) + 1,                          # 1 + k − μ0 > 0
        math.floor(_upper_root(lin_v, const_v)) + 1,          # V
        math.floor(float((mu0 + mu1) / 2 + (r0 + r1) / (2 * a))) + 1,  # W
        math.ceil(-float(lin_v) / 2) + 1,                     # V increasing beyond here
    ]
    k = max(0, *bounds)

    def positive(j):
        return all(v > 0 for v in recurrence_terms(chi, j))

    while not positive(k):  # float rounding in the bound; move up until safe
        k += 1
    while k > 0 and positive(k - 1):
        k -= 1
    return k


@dataclass(frozen=True)
class SignClass:
    tag: str  # "Splus" | "Sminus" | "Undetermined"
    witness: int | None = None

    def to_json(self):
        return {"tag": self.tag, "witness": self.witness}


def classify_sign(chi: CheParams, cap: int = 200) -> SignClass:
    """Scan ℓ = m(χ), …, cap for c_{ℓ−1}, c_ℓ of equal strict sign."""
    m = positivity_threshold(chi)
    if cap < max(m, 1):
        return SignClass("Undetermined")
    c = coefficients(chi, cap)
    for ell in range(max(m, 1), cap + 1):
        if c[ell - 1] > 0 and c[ell] > 0:
            return SignClass("Splus", ell)
        if c[ell - 1] < 0 and c[ell] < 0:
            return SignClass("Sminus", ell)
    return SignClass("Undetermined")


def q_value(chi: CheParams, K: int = 5000, tol: float = 1e-9, method: str = "richardson",
            prec: int = numerics.DEFAULT_PREC):
    """q(μ0, μ1) and an error estimate.

    r_k = Γ(k+1)/Γ(k−μ1)·c_k has an expansion in powers of 1/k, so the limit
    is extracted by Richardson extrapolation over k = K, K/2, …, K/32.
    ``method="aitken"`` applies iterated Δ² to the tail r_{K−40..K} instead."""
    if prec > numerics.DEFAULT_PREC:
        with mpmath.workprec(prec + 16):
            return _q_value(chi, K, tol, method, prec, mpmath.mpf)
    return _q_value(chi, K, tol, method, prec, float)


def _q_value(chi, K, tol, method, prec, num):
    conv = _mp if num is mpmath.mpf else float
    mu0, mu1, r0, r1, a = (conv(v) for v in chi.astuple())
    for mu in (mu0, mu1):
        if mu == int(mu) and mu >= 1:
            raise PoleError(f"Γ(1−μ) pole at μ = {mu}")
    if method == "richardson":
        marks = sorted({K >> j for j in range(6)})
    elif method == "aitken":
        marks = list(range(K - 40, K + 1))
    else:
        raise ValueError(f"unknown acceleration {method!r}")
    wanted = set(marks)
    prev, cur = num(0), num(1)
    rs = {}
    for k in range(K):
        U = (1 + k) * (1 + k - mu0)
        if U == 0:
            raise ResonanceError(k)
        V = k * (k + 1 - 2 * a - mu0 - mu1) + (mu0 - 1) * (mu1 - 1) / 2 + a * (mu0 - 1) + r0
        W = a * (2 * k - mu0 - mu1) - (r0 + r1)
        prev, cur = cur, (V * cur + W * prev) / U
        if k + 1 in wanted:
            rs[k + 1] = numerics.gamma_ratio(k + 1, mu1, prec) * cur
    seq = [rs[k] for k in marks]
    if method == "richardson":
        diag = numerics.richardson([num(1) / k for k in marks], seq)
    else:
        diag = [seq[-1]]
        acc = seq
        while len(acc) >= 3:
            acc = numerics.aitken(acc)
            diag.append(acc[-1])
    limit, err = diag[-1], abs(diag[-1] - diag[-2])
    scale = numerics.gamma_real(1 - mu0, prec) * numerics.gamma_real(1 - mu1, prec)
    q = scale * limit
    err = abs(scale) * err
    if not math.isfinite(float(q)) or err > tol * max(1.0, abs(float(q))):
        raise ConvergenceError(f"q-limit not converged at K={K} (increment {float(err):.3g})",
                               partial=[float(v) for v in seq], K=K)
    return q, err


def _mp(v):
    if isinstance(v, Fraction):
        return mpmath.mpf(v.numerator) / v.denominator
    return mpmath.mpf(v)


def from_trinoid(theta: TrinoidParams, t, signs=(1, 1)) -> CheParams:
    """χ±± = (±√(1−w0t), ±√(1−w1t), r̂0 t, r̂1 t, p√t); float, or mpf when t is mpf."""
    if not 0 < t < 1:
        raise DomainError(f"t must lie in (0,1), got {t}")
    if not theta.p > 0:
        raise SignAssumptionError(f"p must be positive, got {theta.p}")
    num, sqrt = (_mp, mpmath.sqrt) if isinstance(t, mpmath.mpf) else (float, math.sqrt)
    t = num(t)
    mus = []
    for name, w in (("w0", theta.w0), ("w1", theta.w1)):
        arg = 1 - num(w) * t
        if arg <= 0:
            raise DomainError(f"{name}·t ≥ 1: exponent is not real")
        mus.append(sqrt(arg))
    s0, s1 = signs
    return CheParams(s0 * mus[0], s1 * mus[1], num(theta.r0h) * t, num(theta.r1h) * t,
                     num(theta.p) * sqrt(t))


def scalar_che_coeffs(chi: CheParams):
    """(p1, p0) with y'' + p1 y' + p0 y = 0."""
    mu0, mu1, r0, r1, a = chi.astuple()
    A = a * (2 - mu0 - mu1) - (r0 + r1)
    B = (mu0 * mu1 - 2 * a * (1 - mu0) - (mu0 + mu1) + 2 * r0 + 1) / 2

    def check(z):
        if z == 0 or z == 1:
            raise PoleError(f"CHE coefficient evaluated at the singular point z = {z}")

    def p1(z):
        check(z)
        return 2 * a + (1 - mu0) / z + (1 - mu1) / (z - 1)

    def p0(z):
        check(z)
        return (z * A + B) / (z * (z - 1))

    return p1, p0
