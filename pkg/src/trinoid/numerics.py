"""Floating point foundations: real log-gamma, sequence acceleration,
complex paths and an adaptive RKF45 transport integrator for dΦ = Φ·A(z)dz."""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Sequence

import mpmath
import numpy as np

from .errors import DomainError, IntegrationError, PoleError

DEFAULT_PREC = 53
HIGH_PREC = 256
LADDER_ULPS = 1e3


# ---------------------------------------------------------------- precision


def is_marginal(value: float, threshold: float = 0.0, scale: float = 1.0,
                ulps: float = LADDER_ULPS) -> bool:
    """True when ``value`` lies within ``ulps`` units in the last place of ``threshold``."""
    return abs(value - threshold) <= ulps * np.finfo(float).eps * max(abs(scale), abs(threshold), 1e-300)


def _num(prec: int):
    """Scalar constructor for the requested mantissa size."""
    if prec <= DEFAULT_PREC:
        return float
    return mpmath.mpf


# ---------------------------------------------------------------- gamma


@lru_cache(maxsize=None)
def bernoulli(n: int) -> Fraction:
    """Bernoulli number B_n (B_1 = -1/2), exact."""
    a = [Fraction(0)] * (n + 1)
    for m in range(n + 1):
        a[m] = Fraction(1, m + 1)
        for j in range(m, 0, -1):
            a[j - 1] = j * (a[j - 1] - a[j])
    return a[0] if n != 1 else Fraction(-1, 2)


def _stirling(x, prec):
    """ln Γ(x) for large x by the asymptotic series."""
    if prec <= DEFAULT_PREC:
        log, pi, eps = math.log, math.pi, 2.0 ** -60
    else:
        log, pi, eps = mpmath.log, mpmath.pi, mpmath.mpf(2) ** (-prec - 8)
    s = (x - 0.5) * log(x) - x + 0.5 * log(2 * pi)
    x2 = x * x
    xp = x
    for n in range(1, 200):
        b = bernoulli(2 * n)
        term = (b.numerator / (2 * n * (2 * n - 1) * xp)) / b.denominator
        s += term
        if abs(term) < eps * abs(s):
            break
        xp *= x2
    return s


def log_gamma(x, prec: int = DEFAULT_PREC):
    """ln Γ(x) for real x > 0.

    Stirling series above a precision dependent cutoff, upward recurrence
    below it and reflection on (0, 1/2)."""
    num = _num(prec)
    if not x > 0:
        raise DomainError(f"log_gamma needs x > 0, got {x}")
    if prec <= DEFAULT_PREC:
        x = float(x)
        if x == int(x) and x <= 30:
            return math.log(math.factorial(int(x) - 1))
        log, sin, pi = math.log, math.sin, math.pi
        cutoff = 8.0
    else:
        with mpmath.workprec(prec + 16):
            return +_log_gamma_mp(mpmath.mpf(x), prec)
    if x < 0.5:
        return log(pi) - log(sin(pi * x)) - log_gamma(1 - x, prec)
    shift = 0.0
    prod = num(1)
    while x < cutoff:
        prod *= x
        x += 1
    if prod != 1:
        shift = log(prod)
    return _stirling(x, prec) - shift


def _log_gamma_mp(x, prec):
    if x < 0.5:
        return mpmath.log(mpmath.pi) - mpmath.log(mpmath.sin(mpmath.pi * x)) - _log_gamma_mp(1 - x, prec)
    cutoff = max(8, prec // 4)
    prod = mpmath.mpf(1)
    while x < cutoff:
        prod *= x
        x += 1
    return _stirling(x, prec) - mpmath.log(prod)


def gamma_real(x, prec: int = DEFAULT_PREC):
    """Γ(x) for real x off the non-positive integers (reflection for x ≤ 0)."""
    if x > 0:
        if prec <= DEFAULT_PREC:
            return math.exp(log_gamma(x))
        with mpmath.workprec(prec + 16):
            return +mpmath.exp(log_gamma(x, prec))
    if x == int(x):
        raise PoleError(f"Γ has a pole at {x}")
    if prec <= DEFAULT_PREC:
        return math.pi / (math.sin(math.pi * x) * gamma_real(1 - x))
    with mpmath.workprec(prec + 16):
        return mpmath.pi / (mpmath.sin(mpmath.pi * x) * gamma_real(1 - x, prec))


def gamma_ratio(k: int, mu, prec: int = DEFAULT_PREC):
    """Γ(k+1)/Γ(k−μ) through a log-gamma difference."""
    if not k - mu > 0:
        raise DomainError(f"Γ(k−μ) pole region: k={k}, μ={mu}")
    if prec <= DEFAULT_PREC:
        return math.exp(log_gamma(k + 1) - log_gamma(k - mu))
    with mpmath.workprec(prec + 16):
        return +mpmath.exp(log_gamma(k + 1, prec) - log_gamma(k - mu, prec))


# ---------------------------------------------------------------- acceleration


def aitken(seq: Sequence) -> list:
    """One sweep of Aitken's Δ² process."""
    out = []
    for s0, s1, s2 in zip(seq, seq[1:], seq[2:]):
        d2 = s2 - 2 * s1 + s0
        out.append(s2 if d2 == 0 else s2 - (s2 - s1) ** 2 / d2)
    return out


def richardson(hs: Sequence, values: Sequence):
    """Neville extrapolation of values(h) to h = 0.

    Returns the table diagonal; the last entry is the best estimate."""
    p = list(values)
    diag = [p[0]]
    for m in range(1, len(p)):
        for i in range(len(p) - 1, m - 1, -1):
            p[i] = (hs[i - m] * p[i] - hs[i] * p[i - 1]) / (hs[i - m] - hs[i])
        diag.append(p[m])
    return diag


# ---------------------------------------------------------------- paths


@dataclass(frozen=True)
class Segment:
    z_from: complex
    z_to: complex

    def point(self, s):
        return self.z_from + s * (self.z_to - self.z_from)

    def velocity(self, s):
        return self.z_to - self.z_from

    @property
    def start(self):
        return complex(self.z_from)

    @property
    def end(self):
        return complex(self.z_to)

    @property
    def length(self):
        return abs(self.z_to - self.z_from)

    def reversed(self):
        return Segment(self.z_to, self.z_from)


@dataclass(frozen=True)
class Circle:
    """Circle around ``center`` starting at angle ``phase``; orientation +1 is counterclockwise."""

    center: complex
    radius: float
    phase: float = 0.0
    orientation: int = 1

    def __post_init__(self):
        if not self.radius > 0:
            raise DomainError("circle radius must be positive")

    def point(self, s):
        return self.center + self.radius * cmath.exp(1j * (self.phase + self.orientation * 2 * math.pi * s))

    def velocity(self, s):
        return 2j * math.pi * self.orientation * (self.point(s) - self.center)

    @property
    def start(self):
        return self.point(0.0)

    @property
    def end(self):
        return self.point(0.0)

    @property
    def length(self):
        return 2 * math.pi * self.radius

    def reversed(self):
        return Circle(self.center, self.radius, self.phase, -self.orientation)


class Composite:
    """Concatenation of pieces; continuity is checked on construction."""

    def __init__(self, pieces, atol=1e-12):
        flat = []
        for piece in pieces:
            flat.extend(piece.pieces if isinstance(piece, Composite) else [piece])
        for a, b in zip(flat, flat[1:]):
            if abs(a.end - b.start) > atol:
                raise DomainError(f"path pieces not continuous at {a.end} -> {b.start}")
        self.pieces = tuple(flat)

    @property
    def start(self):
        return self.pieces[0].start

    @property
    def end(self):
        return self.pieces[-1].end

    @property
    def length(self):
        return sum(p.length for p in self.pieces)

    def reversed(self):
        return Composite([p.reversed() for p in reversed(self.pieces)])

    def __add__(self, other):
        return Composite([self, other])


def as_composite(path) -> Composite:
    return path if isinstance(path, Composite) else Composite([path])


# the Fehlberg 4(5) tableau
_C = (0.0, 1 / 4, 3 / 8, 12 / 13, 1.0, 1 / 2)
_A = (
    (),
    (1 / 4,),
    (3 / 32, 9 / 32),
    (1932 / 2197, -7200 / 2197, 7296 / 2197),
    (439 / 216, -8.0, 3680 / 513, -845 / 4104),
    (-8 / 27, 2.0, -3544 / 2565, 1859 / 4104, -11 / 40),
)
_B5 = (16 / 135, 0.0, 6656 / 12825, 28561 / 56430, -9 / 50, 2 / 55)
_B4 = (25 / 216, 0.0, 1408 / 2565, 2197 / 4104, -1 / 5, 0.0)


@dataclass
class TransportResult:
    matrix: np.ndarray
    est_error: float
    steps: int


def _transport_piece(coeff, piece, phi, tol, h_min):
    def rhs(s, y):
        return y @ (np.asarray(coeff(piece.point(s)), dtype=complex) * piece.velocity(s))

    s, h = 0.0, 1 / 16
    err_total, steps = 0.0, 0
    while s < 1.0:
        h = min(h, 1.0 - s)
        k = []
        for i in range(6):
            y = phi
            for j, a in enumerate(_A[i]):
                y = y + h * a * k[j]
            k.append(rhs(s + _C[i] * h, y))
        y5 = phi + h * sum(b * kk for b, kk in zip(_B5, k))
        y4 = phi + h * sum(b * kk for b, kk in zip(_B4, k))
        err = float(np.max(np.abs(y5 - y4))) / max(1.0, float(np.max(np.abs(phi))))
        if not np.all(np.isfinite(y5)):
            err = math.inf
        if err <= tol:
            s += h
            phi = y5
            err_total += err
            steps += 1
        if err == 0:
            h *= 4
            continue
        factor = 0.9 * (tol / err) ** 0.2 if math.isfinite(err) else 0.1
        h *= min(4.0, max(0.1, factor))
        if h < h_min and s < 1.0:
            raise IntegrationError(f"step size underflow near z = {piece.point(s)}", piece.point(s))
    return phi, err_total, steps


def integrate_transport(coeff: Callable[[complex], np.ndarray], path, tol: float = 1e-12) -> TransportResult:
    """Transport T with Φ(end) = Φ(start)·T for dΦ = Φ·coeff(z)dz along ``path``.

    Fehlberg 4(5) with local extrapolation; ``tol`` bounds the local error per step,
    measured relative to max(1, |Φ|)."""
    if not tol > 0:
        raise DomainError("tol must be positive")
    phi = np.eye(2, dtype=complex)
    err, steps = 0.0, 0
    for piece in as_composite(path).pieces:
        phi, e, n = _transport_piece(coeff, piece, phi, tol, 1e-14)
        err += e
        steps += n
    return TransportResult(phi, err, steps)
