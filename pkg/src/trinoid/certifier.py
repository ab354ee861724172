"""Exact unitarisability certificate for a trinoid parameter tuple Θ.

With x = √t, μ_j = ±y_j, y_j² = 1 − w_j x², r_j = r̂_j x², a = p x, every
recurrence coefficient c_n(χ±±(t)) is N_n/D_n with N_n, D_n ∈ Q[x, y0, y1].
The norm reduce_radicals(four_sign_product(N_n)) ∈ Q[x] vanishes at some
x ∈ (0,1] iff c_n vanishes there on one of the four sign branches.

Certificate: a level k0 at or above the uniform positivity threshold such that
  (i)  the norms of N_{k0−1}, N_{k0}, D_{k0} have no root on (0,1] (Sturm),
  (ii) c_{k0−1}, c_{k0} share a strict sign at t0 on every branch (exact surds),
and the number of branches with positive sign is odd.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

from .che import SIGNS, sign_label
from .errors import CertificationError, DomainError, SignAssumptionError, SignConditionError
from .exactalg import Surd, TriPoly, UniPoly, count_roots, four_sign_product, reduce_radicals
from .params import TrinoidParams, fmt_rational

__all__ = [
    "TrinoidParams", "Certificate", "numerator_poly", "denominator_poly", "coefficient_norm",
    "f_poly", "uniform_k0", "sign_table", "certify", "family_scale", "CONVENTION_NOTE",
]

CONVENTION_NOTE = (
    "N_n, D_n from N_{n+1} = V(n)N_n + W(n)U(n-1)N_{n-1}, N_0 = 1, D_n = U(0)...U(n-1) "
    "with mu_j -> y_j, r_j -> r_j_hat x^2, a -> p x; no content normalization. "
    "f_l is the norm of N_{l+1}; the certificate itself uses the norms of N_{k0-1}, N_{k0}, D_{k0}."
)

DEFAULT_T0 = Fraction(4, 5)
MAX_EXTRA_LEVELS = 4

_X = TriPoly.var("x")
_Y0 = TriPoly.var("y0")
_Y1 = TriPoly.var("y1")


def _uvw(theta: TrinoidParams, k: int):
    w0, w1, r0h, r1h, p = theta.astuple()
    px = _X * p
    U = (_Y0 * -1 + (1 + k)) * (1 + k)
    V = (px * -2 - _Y0 - _Y1 + (k + 1)) * k + (_Y0 - 1) * (_Y1 - 1) * Fraction(1, 2) \
        + px * (_Y0 - 1) + _X * _X * r0h
    W = px * (_Y0 * -1 - _Y1 + 2 * k) - _X * _X * (r0h + r1h)
    return U, V, W


@lru_cache(maxsize=256)
def _numerators(theta: TrinoidParams, n: int):
    """(N_0..N_n, D_0..D_n), each reduced modulo y_j² = 1 − w_j x².

    Reduction modulo the radical relations commutes with the four-sign product
    and with the final substitution, so the norms are unchanged."""
    theta.require_exact()
    w0, w1 = theta.w0, theta.w1
    N = [TriPoly.const(1)]
    D = [TriPoly.const(1)]
    prev_U = None
    for k in range(n):
        U, V, W = _uvw(theta, k)
        nxt = V * N[k]
        if k > 0:
            nxt = nxt + W * prev_U * N[k - 1]
        N.append(nxt.reduce_mod(w0, w1))
        D.append((D[k] * U).reduce_mod(w0, w1))
        prev_U = U
    return tuple(N), tuple(D)


def numerator_poly(theta: TrinoidParams, n: int) -> TriPoly:
    return _numerators(theta, n)[0][n]


def denominator_poly(theta: TrinoidParams, n: int) -> TriPoly:
    return _numerators(theta, n)[1][n]


@lru_cache(maxsize=256)
def coefficient_norm(theta: TrinoidParams, n: int, which: str = "num") -> UniPoly:
    """Radical-eliminated norm of N_n ("num") or D_n ("den")."""
    F = numerator_poly(theta, n) if which == "num" else denominator_poly(theta, n)
    return reduce_radicals(four_sign_product(F), theta.w0, theta.w1)


def f_poly(theta: TrinoidParams, ell: int) -> UniPoly:
    """f_ℓ: the norm of the numerator of c_{ℓ+1}."""
    return coefficient_norm(theta, ell + 1, "num")


# ---------------------------------------------------------------- uniform threshold

_SQRT_BITS = 64


def _sqrt_lo(q: Fraction) -> Fraction:
    if q <= 0:
        return Fraction(0)
    scale = 1 << (2 * _SQRT_BITS)
    return Fraction(math.isqrt(q.numerator * scale // q.denominator), 1 << _SQRT_BITS)


def _sqrt_hi(q: Fraction) -> Fraction:
    scale = 1 << (2 * _SQRT_BITS)
    return Fraction(math.isqrt(-(-q.numerator * scale // q.denominator)) + 1, 1 << _SQRT_BITS)


def _iadd(*xs):
    return (sum(x[0] for x in xs), sum(x[1] for x in xs))


def _imul(a, b):
    ps = (a[0] * b[0], a[0] * b[1], a[1] * b[0], a[1] * b[1])
    return (min(ps), max(ps))


def _iscale(c, a):
    return (c * a[0], c * a[1]) if c >= 0 else (c * a[1], c * a[0])


def _mu_box(w, sign, xlo, xhi):
    g = sorted((1 - w * xlo * xlo, 1 - w * xhi * xhi))
    box = (_sqrt_lo(g[0]), _sqrt_hi(g[1]))
    return box if sign > 0 else (-box[1], -box[0])


def _positive_from(theta, k, signs, xlo, xhi) -> bool:
    """Interval proof that U, V, W > 0 at k and stay positive for k' ≥ k, for x ∈ [xlo, xhi]."""
    w0, w1, r0h, r1h, p = theta.astuple()
    m0 = _mu_box(w0, signs[0], xlo, xhi)
    m1 = _mu_box(w1, signs[1], xlo, xhi)
    a = (p * xlo, p * xhi)
    x2 = (xlo * xlo, xhi * xhi)
    r0 = _iscale(r0h, x2)
    one = (Fraction(1), Fraction(1))
    if not (1 + k - m0[1] > 0):
        return False
    # V(k) = k(k+1−2a−μ0−μ1) + ½(μ0−1)(μ1−1) + a(μ0−1) + r0
    inner = _iadd(((k + 1), (k + 1)), _iscale(-2, a), _iscale(-1, m0), _iscale(-1, m1))
    V = _iadd(_iscale(k, inner),
              _iscale(Fraction(1, 2), _imul(_iadd(m0, _iscale(-1, one)), _iadd(m1, _iscale(-1, one)))),
              _imul(a, _iadd(m0, _iscale(-1, one))), r0)
    if not V[0] > 0:
        return False
    # V(k+1) − V(k) = 2k + 2 − 2a − μ0 − μ1 is increasing in k
    dV = _iadd((2 * k + 2, 2 * k + 2), _iscale(-2, a), _iscale(-1, m0), _iscale(-1, m1))
    if not dV[0] > 0:
        return False
    # W(k)/x = p(2k − μ0 − μ1) − (r̂0 + r̂1)x, increasing in k since p > 0
    Wx = _iadd(_iscale(p, _iadd((2 * k, 2 * k), _iscale(-1, m0), _iscale(-1, m1))),
               _iscale(-(r0h + r1h), (xlo, xhi)))
    return Wx[0] > 0


def _level_ok(theta, k, depth_limit=10) -> bool:
    stack = [(Fraction(0), Fraction(1), 0)]
    while stack:
        lo, hi, depth = stack.pop()
        if all(_positive_from(theta, k, s, lo, hi) for s in SIGNS):
            continue
        if depth >= depth_limit:
            return False
        mid = (lo + hi) / 2
        stack += [(lo, mid, depth + 1), (mid, hi, depth + 1)]
    return True


def uniform_k0(theta: TrinoidParams, cap: int = 100) -> int:
    """Smallest k0 for which interval arithmetic proves U, V, W > 0 for all k ≥ k0,
    all four sign branches and all t ∈ (0,1]."""
    theta.require_exact()
    if not theta.p > 0:
        raise SignAssumptionError(f"p must be positive, got {theta.p}")
    if theta.w0 >= 1 or theta.w1 >= 1:
        raise DomainError("w_k < 1 required for real exponents on (0,1]")
    for k in range(cap + 1):
        if _level_ok(theta, k):
            return k
    raise CertificationError(f"no uniform positivity threshold up to k0 = {cap}")


# ---------------------------------------------------------------- signs at t0


def _exact_coefficient_signs(theta: TrinoidParams, t0: Fraction, signs, n: int):
    """Signs of c_0..c_n at χ±±(t0), in exact surd arithmetic."""
    x = Surd.sqrt(t0)
    s0, s1 = signs
    mu0 = Surd.sqrt(1 - theta.w0 * t0) * s0
    mu1 = Surd.sqrt(1 - theta.w1 * t0) * s1
    a = x * theta.p
    r0, r1 = theta.r0h * t0, theta.r1h * t0
    N = [Surd.rational(1)]
    D = [Surd.rational(1)]
    prev_U = None
    for k in range(n):
        U = (mu0 * -1 + (1 + k)) * (1 + k)
        V = (a * -2 - mu0 - mu1 + (k + 1)) * k + (mu0 - 1) * (mu1 - 1) * Fraction(1, 2) + a * (mu0 - 1) + r0
        W = a * (mu0 * -1 - mu1 + 2 * k) - (r0 + r1)
        nxt = V * N[k]
        if k > 0:
            nxt = nxt + W * prev_U * N[k - 1]
        N.append(nxt)
        D.append(D[k] * U)
        prev_U = U
    return [num.sign() * den.sign() for num, den in zip(N, D)]


def sign_table(theta: TrinoidParams, t0=DEFAULT_T0, k0: int = 2) -> dict:
    """Common strict sign of c_{k0−1}, c_{k0} on each branch at t0, keyed "++", "+-", ..."""
    theta.require_exact()
    t0 = Fraction(t0)
    if not 0 < t0 < 1:
        raise DomainError(f"t0 must lie in (0,1), got {t0}")
    if k0 < 1:
        raise DomainError("k0 ≥ 1 required")
    table = {}
    for signs in SIGNS:
        sg = _exact_coefficient_signs(theta, t0, signs, k0)
        a, b = sg[k0 - 1], sg[k0]
        if a == 0 or b == 0 or a != b:
            raise SignConditionError(
                f"branch {sign_label(signs)}: sign c_{k0 - 1} = {a}, sign c_{k0} = {b} at t0 = {t0}")
        table[sign_label(signs)] = a
    return table


# ---------------------------------------------------------------- certificate


@dataclass
class Certificate:
    theta: TrinoidParams
    k0: int | None
    t0: Fraction
    sturm_counts: dict = field(default_factory=dict)
    sturm_counts_open: dict = field(default_factory=dict)
    sign_table: dict = field(default_factory=dict)
    parity_plus: int | None = None
    verdict: str = "NotCertified"
    hypothesis_flags: dict = field(default_factory=dict)
    convention_note: str = CONVENTION_NOTE
    k0_min: int | None = None
    printed_convention_counts: dict = field(default_factory=dict)
    failure: str | None = None
    attempts: list = field(default_factory=list)

    @property
    def unitarisable(self) -> bool:
        return self.verdict == "Unitarisable"

    def to_json(self):
        return {
            "theta": self.theta.to_json(), "k0": self.k0, "k0_min": self.k0_min,
            "t0": fmt_rational(self.t0),
            "sturm_counts": self.sturm_counts, "sturm_counts_open": self.sturm_counts_open,
            "f_counts": self.printed_convention_counts,
            "sign_table": {k: "+" if v > 0 else "-" for k, v in self.sign_table.items()},
            "parity_plus": self.parity_plus, "verdict": self.verdict,
            "hypothesis_flags": self.hypothesis_flags, "convention_note": self.convention_note,
            "failure": self.failure, "attempts": self.attempts,
        }


def _hypothesis_flags(theta: TrinoidParams) -> dict:
    """Per branch: does μ_j < 1 hold for every t ∈ (0,1]?"""
    flags = {}
    for s0, s1 in SIGNS:
        flags[sign_label((s0, s1))] = {"mu0<1": s0 < 0 or theta.w0 > 0, "mu1<1": s1 < 0 or theta.w1 > 0}
    return flags


@lru_cache(maxsize=256)
def _counts(theta: TrinoidParams, n: int, which: str):
    """Distinct roots of a coefficient norm on (0,1] and on (0,1)."""
    poly = coefficient_norm(theta, n, which)
    closed = count_roots(poly, (0, 1))
    return closed, closed - int(poly.eval_exact(1) == 0)


def _try_level(theta, t0, k0, cert):
    try:
        table = sign_table(theta, t0, k0)
    except SignConditionError as exc:
        return str(exc)
    counts, open_counts = {}, {}
    for n, which in ((k0 - 1, "num"), (k0, "num"), (k0, "den")):
        key = f"{which} c_{n}"
        counts[key], open_counts[key] = _counts(theta, n, which)
        if counts[key]:
            return f"roots on (0,1]: {key} ({counts[key]})"
    cert.k0 = k0
    cert.sign_table = table
    cert.sturm_counts = counts
    cert.sturm_counts_open = open_counts
    cert.parity_plus = sum(1 for v in table.values() if v > 0)
    for ell in (k0 - 1, k0):
        cert.printed_convention_counts[f"f_{ell}"] = _counts(theta, ell + 1, "num")[0]
    return None


def certify(theta: TrinoidParams, t0=DEFAULT_T0, extra_levels: int = MAX_EXTRA_LEVELS) -> Certificate:
    """Try levels k0 = k0_min, …, k0_min + extra_levels; the first level meeting
    (i) and (ii) decides the verdict through the parity of positive branches."""
    theta.require_exact()
    if not theta.p > 0:
        raise SignAssumptionError(f"p must be positive, got {theta.p}")
    t0 = Fraction(t0)
    if not 0 < t0 < 1:
        raise DomainError(f"t0 must lie in (0,1), got {t0}")
    cert = Certificate(theta, None, t0, hypothesis_flags=_hypothesis_flags(theta))
    try:
        cert.k0_min = uniform_k0(theta)
    except (CertificationError, DomainError) as exc:
        cert.failure = f"uniform threshold: {exc}"
        return cert
    for k0 in range(max(cert.k0_min, 1), max(cert.k0_min, 1) + extra_levels + 1):
        reason = _try_level(theta, t0, k0, cert)
        cert.attempts.append({"k0": k0, "result": reason or "ok"})
        if reason is None:
            break
    else:
        cert.failure = "no level satisfies both the Sturm and the sign conditions"
        return cert
    broken = [b for b, f in cert.hypothesis_flags.items() if not all(f.values())]
    if broken:
        cert.failure = "hypothesis mu_j < 1 fails on branches " + ", ".join(broken)
    elif cert.parity_plus % 2 == 1:
        cert.verdict = "Unitarisable"
    else:
        cert.failure = f"even number ({cert.parity_plus}) of positive branches"
    return cert


def family_scale(theta: TrinoidParams, kappa) -> TrinoidParams:
    """Θ_κ = (κw0, κw1, κr̂0, κr̂1, √κ p). Exact when √κ is rational, float p otherwise."""
    kappa = Fraction(kappa)
    if not 0 < kappa <= 1:
        raise DomainError(f"kappa must lie in (0,1], got {kappa}")
    n, d = math.isqrt(kappa.numerator), math.isqrt(kappa.denominator)
    if n * n == kappa.numerator and d * d == kappa.denominator:
        root = Fraction(n, d)
        p = theta.p * root
    else:
        p = float(theta.p) * math.sqrt(kappa)
    return TrinoidParams(kappa * theta.w0, kappa * theta.w1, kappa * theta.r0h, kappa * theta.r1h, p)
