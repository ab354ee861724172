"""Decision procedures for unitarisability of SL(2,C) matrices and pairs, and the
Klein ball model of hyperbolic 3-space.

A 2×2 matrix acts on CP¹ by Möbius transformations; its eigenlines are its fixed
points. A positive Hermitian H = [[a+b, c+id], [c−id, a−b]] maps to (b, c, d)/a in
the closed unit ball, where invertible matrices land inside and rank-1 matrices
(points of CP¹ through v ↦ v v*) land on the boundary sphere.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import mpmath
import numpy as np

from .errors import DegenerateInputError, DomainError, ReducibleError

DET_TOL = 1e-12
POINT_TOL = 1e-12


def as_matrix(m) -> np.ndarray:
    """2×2 complex array from nested lists, [re, im] pairs or an ndarray."""
    if isinstance(m, np.ndarray) and m.shape == (2, 2):
        return m.astype(complex)
    rows = []
    for row in m:
        rows.append([complex(v[0], v[1]) if isinstance(v, (list, tuple)) else complex(v) for v in row])
    out = np.array(rows, dtype=complex)
    if out.shape != (2, 2):
        raise DomainError(f"expected a 2x2 matrix, got shape {out.shape}")
    return out


def matrix_to_json(m):
    return [[[complex(v).real, complex(v).imag] for v in row] for row in np.asarray(m)]


def is_pm_identity(M, tol: float = DET_TOL) -> bool:
    M = as_matrix(M)
    return any(np.max(np.abs(M - s * np.eye(2))) <= tol for s in (1, -1))


def _require_sl2(M):
    M = as_matrix(M)
    det = complex(np.linalg.det(M))
    if abs(det - 1) > 1e-10 * max(1.0, float(np.max(np.abs(M))) ** 2):
        raise DomainError(f"det M = {det:.6g}, expected 1")
    return M


# ---------------------------------------------------------------- CP¹


@dataclass(frozen=True)
class CP1Point:
    """Homogeneous pair (x, y) ≠ (0, 0); the affine value is x/y, ∞ when y = 0."""

    x: complex
    y: complex

    def __post_init__(self):
        if self.x == 0 and self.y == 0:
            raise DegenerateInputError("(0, 0) is not a point of CP1")

    @classmethod
    def of(cls, value) -> "CP1Point":
        if value is None or (isinstance(value, float) and math.isinf(value)):
            return cls(1, 0)
        return cls(complex(value), 1)

    @property
    def is_infinity(self) -> bool:
        return abs(self.y) <= POINT_TOL * abs(self.x)

    @property
    def value(self) -> complex:
        return complex(math.inf) if self.is_infinity else self.x / self.y

    def normalized(self) -> np.ndarray:
        v = np.array([self.x, self.y], dtype=complex)
        return v / np.linalg.norm(v)

    def distance(self, other: "CP1Point") -> float:
        """Chordal distance: |x y' − y x'| for unit representatives."""
        u, v = self.normalized(), other.normalized()
        return float(abs(u[0] * v[1] - u[1] * v[0]))

    def close_to(self, other: "CP1Point", tol: float = 1e-10) -> bool:
        return self.distance(other) <= tol

    def moved(self, g) -> "CP1Point":
        g = as_matrix(g)
        v = g @ np.array([self.x, self.y], dtype=complex)
        return CP1Point(complex(v[0]), complex(v[1]))

    def to_json(self):
        if self.is_infinity:
            return "inf"
        z = self.value
        return [z.real, z.imag]


def _eigvec(M, lam):
    (a, b), (c, d) = M
    cands = [np.array([lam - d, c]), np.array([b, lam - a])]
    v = max(cands, key=lambda u: float(np.linalg.norm(u)))
    return CP1Point(complex(v[0]), complex(v[1]))


def eigenlines(M):
    """Fixed points of M on CP¹: two for diagonalizable M, one for parabolic M."""
    M = as_matrix(M)
    if is_pm_identity(M) or np.max(np.abs(M - M[0, 0] * np.eye(2))) <= DET_TOL * max(1.0, abs(M[0, 0])):
        raise DegenerateInputError("M is a scalar matrix: every line is fixed")
    tr = complex(np.trace(M))
    det = complex(np.linalg.det(M))
    disc = cmath.sqrt(tr * tr - 4 * det)
    scale = max(1.0, abs(tr))
    if abs(disc) <= 1e-7 * scale:
        return (_eigvec(M, tr / 2),)
    return (_eigvec(M, (tr + disc) / 2), _eigvec(M, (tr - disc) / 2))


def _hdet(p: CP1Point, q: CP1Point):
    return p.x * q.y - p.y * q.x


def cross_ratio(a: CP1Point, b: CP1Point, c: CP1Point, d: CP1Point) -> complex:
    """[a,b,c,d] = (b−c)(d−a)/((b−a)(d−c)) in homogeneous form, so [0,1,∞,x] = x."""
    pts = [p if isinstance(p, CP1Point) else CP1Point.of(p) for p in (a, b, c, d)]
    units = [CP1Point(*p.normalized()) for p in pts]
    for i in range(4):
        for j in range(i + 1, 4):
            if units[i].distance(units[j]) <= POINT_TOL:
                raise DegenerateInputError("cross ratio needs four distinct points")
    a, b, c, d = units
    return complex(_hdet(b, c) * _hdet(d, a) / (_hdet(b, a) * _hdet(d, c)))


def _is_real(z: complex) -> bool:
    return abs(z.imag) <= max(1e-10, 1e-8 * abs(z.real))


def _marginal(z: complex) -> bool:
    """Inside a factor 100 of the realness band or of the sign boundary."""
    band = max(1e-10, 1e-8 * abs(z.real))
    return abs(abs(z.imag) - band) < 0.99 * band or abs(z.real) < 1e-10


# ---------------------------------------------------------------- verdicts


@dataclass
class Verdict:
    value: bool
    kind: str
    trace: complex | None = None
    cross_ratio: complex | None = None
    residuals: dict = field(default_factory=dict)
    flags: list = field(default_factory=list)

    def __bool__(self):
        return self.value

    def to_json(self):
        def c(z):
            return None if z is None else [complex(z).real, complex(z).imag]

        return {"value": self.value, "kind": self.kind, "trace": c(self.trace),
                "cross_ratio": c(self.cross_ratio), "residuals": self.residuals, "flags": self.flags}


def classify(M) -> Verdict:
    """elliptic | parabolic | loxodromic | identity, with the unitarisability verdict."""
    M = _require_sl2(M)
    tr = complex(np.trace(M))
    if is_pm_identity(M):
        return Verdict(True, "identity", tr, flags=["+-Id: unitarisable, every line fixed"])
    residual = {"trace_imag": abs(tr.imag)}
    if not _is_real(tr):
        return Verdict(False, "loxodromic", tr, residuals=residual)
    if abs(abs(tr.real) - 2) <= 1e-10:
        return Verdict(False, "parabolic", tr, residuals=residual)
    if abs(tr.real) < 2:
        return Verdict(True, "elliptic", tr, residuals=residual)
    return Verdict(False, "loxodromic", tr, residuals=residual)


def is_unitarisable(M) -> bool:
    """True iff M = ±Id or M is elliptic (real trace in (−2, 2))."""
    return classify(M).value


def _pair_cross_ratio(M0, M1):
    phi = eigenlines(M0)
    psi = eigenlines(M1)
    if len(phi) != 2 or len(psi) != 2:
        raise DomainError("both matrices must have two eigenlines")
    for p in phi:
        for q in psi:
            if p.close_to(q, 1e-9):
                raise ReducibleError("the pair shares an eigenline: reducible")
    return cross_ratio(phi[0], psi[0], phi[1], psi[1])


def _pair_cross_ratio_mp(M0, M1, prec=256):
    with mpmath.workprec(prec):
        lines = []
        for M in (M0, M1):
            A = mpmath.matrix([[mpmath.mpc(v) for v in row] for row in M])
            tr = A[0, 0] + A[1, 1]
            disc = mpmath.sqrt(tr * tr - 4 * (A[0, 0] * A[1, 1] - A[0, 1] * A[1, 0]))
            pair = []
            for lam in ((tr + disc) / 2, (tr - disc) / 2):
                u = (lam - A[1, 1], A[1, 0])
                w = (A[0, 1], lam - A[0, 0])
                pair.append(max((u, w), key=lambda v: abs(v[0]) + abs(v[1])))
            lines.append(pair)
        (p0, p1), (q0, q1) = lines

        def det(p, q):
            return p[0] * q[1] - p[1] * q[0]

        z = det(q0, p1) * det(q1, p0) / (det(q0, p0) * det(q1, p1))
        return complex(z)


def simultaneously_unitarisable_pair(M0, M1) -> Verdict:
    """Irreducible unitarisable pair: simultaneously unitarisable iff the cross
    ratio of eigenlines [φ, ψ, φ′, ψ′] is negative real."""
    v0, v1 = classify(M0), classify(M1)
    flags = []
    for name, v in (("M0", v0), ("M1", v1)):
        if not v.value:
            raise DomainError(f"{name} is not unitarisable ({v.kind})")
        if v.kind == "identity":
            flags.append(f"{name} = +-Id: reduces to the other matrix")
    if flags:
        return Verdict(True, "identity", flags=flags)
    M0, M1 = as_matrix(M0), as_matrix(M1)
    z = _pair_cross_ratio(M0, M1)
    residuals = {"imag_53": abs(z.imag)}
    if _marginal(z):
        z = _pair_cross_ratio_mp(M0, M1)
        residuals["imag_256"] = abs(z.imag)
        flags.append("re-tested at 256 bits")
    value = _is_real(z) and z.real < 0
    return Verdict(value, "pair", cross_ratio=z, residuals=residuals, flags=flags)


# ---------------------------------------------------------------- Klein model


def klein_point(X) -> np.ndarray:
    """(b, c, d)/a for X X* = [[a+b, c+id], [c−id, a−b]]; X is 2×2 or a column 2-vector."""
    X = np.asarray(X, dtype=complex)
    if X.ndim == 1:
        X = X.reshape(2, 1)
    if X.shape[0] != 2:
        raise DomainError(f"expected 2 rows, got shape {X.shape}")
    H = X @ X.conj().T
    a = (H[0, 0] + H[1, 1]).real / 2
    if a <= 0:
        raise DegenerateInputError("X = 0 has no Klein image")
    b = (H[0, 0] - H[1, 1]).real / 2
    return np.array([b, H[0, 1].real, H[0, 1].imag]) / a


def boundary_point(p: CP1Point) -> np.ndarray:
    """Image of a CP¹ point through its rank-1 representative v v*."""
    return klein_point(p.normalized().reshape(2, 1))


@dataclass
class Axes:
    endpoints0: tuple
    endpoints1: tuple
    intersection: np.ndarray | None
    gap: float

    def to_json(self):
        return {"endpoints0": [list(map(float, p)) for p in self.endpoints0],
                "endpoints1": [list(map(float, p)) for p in self.endpoints1],
                "intersection": None if self.intersection is None else list(map(float, self.intersection)),
                "gap": self.gap}


def _segment_closest(p0, p1, q0, q1):
    """Closest points of segments [p0, p1] and [q0, q1] in R³."""
    u, v, w = p1 - p0, q1 - q0, p0 - q0
    a, b, c, d, e = u @ u, u @ v, v @ v, u @ w, v @ w
    den = a * c - b * b
    s = 0.0 if den <= 1e-300 else float(np.clip((b * e - c * d) / den, 0, 1))
    t = float(np.clip((b * s + e) / c, 0, 1)) if c > 0 else 0.0
    s = float(np.clip((b * t - d) / a, 0, 1)) if a > 0 else 0.0
    return p0 + s * u, q0 + t * v


def axes(M0, M1, tol: float = 1e-8) -> Axes:
    """Axes of two elliptic matrices as chords of the Klein ball and their common point."""
    for name, M in (("M0", M0), ("M1", M1)):
        v = classify(M)
        if v.kind != "elliptic":
            raise DomainError(f"{name} is {v.kind}; axes need elliptic matrices")
    e0 = tuple(boundary_point(p) for p in eigenlines(M0))
    e1 = tuple(boundary_point(p) for p in eigenlines(M1))
    a, b = _segment_closest(e0[0], e0[1], e1[0], e1[1])
    gap = float(np.linalg.norm(a - b))
    return Axes(e0, e1, (a + b) / 2 if gap <= tol else None, gap)


def axis_fixed_point_check(M, X, tol: float = 1e-8) -> bool:
    """True when klein_point(X) lies on the axis of M."""
    e = [boundary_point(p) for p in eigenlines(M)]
    k = klein_point(X)
    a, _ = _segment_closest(e[0], e[1], k, k)
    return float(np.linalg.norm(a - k)) <= tol
