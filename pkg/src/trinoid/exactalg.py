"""Exact rational polynomials, radical elimination, Sturm root counting and
signs of sums of square roots."""
from __future__ import annotations

import math
from fractions import Fraction
from functools import reduce

import mpmath

from .errors import DegenerateInputError, DomainError, ParityError

Rational = Fraction


def _frac(v) -> Fraction:
    return v if isinstance(v, Fraction) else Fraction(v)


def fmt(q: Fraction) -> str:
    q = _frac(q)
    return f"{q.numerator}/{q.denominator}"


# ---------------------------------------------------------------- univariate


class UniPoly:
    """Polynomial in x with Fraction coefficients, ascending degree."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs=()):
        c = [_frac(v) for v in coeffs]
        while c and c[-1] == 0:
            c.pop()
        self.coeffs = tuple(c)

    @classmethod
    def x(cls):
        return cls([0, 1])

    @classmethod
    def const(cls, v):
        return cls([v])

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def lc(self) -> Fraction:
        return self.coeffs[-1] if self.coeffs else Fraction(0)

    def __repr__(self):
        return f"UniPoly({[str(c) for c in self.coeffs]})"

    def __eq__(self, other):
        if not isinstance(other, UniPoly):
            other = UniPoly([other])
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def _coerce(self, other):
        return other if isinstance(other, UniPoly) else UniPoly([other])

    def __add__(self, other):
        other = self._coerce(other)
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (0,) * (n - len(self.coeffs))
        b = other.coeffs + (0,) * (n - len(other.coeffs))
        return UniPoly([u + v for u, v in zip(a, b)])

    __radd__ = __add__

    def __neg__(self):
        return UniPoly([-c for c in self.coeffs])

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        other = self._coerce(other)
        if self.is_zero() or other.is_zero():
            return UniPoly()
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return UniPoly(out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        out = UniPoly([1])
        for _ in range(n):
            out = out * self
        return out

    def __divmod__(self, other):
        other = self._coerce(other)
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        q = [Fraction(0)] * max(len(rem) - other.degree, 1)
        lc = other.lc
        while len(rem) - 1 >= other.degree and rem:
            shift = len(rem) - 1 - other.degree
            f = rem[-1] / lc
            q[shift] = f
            for i, b in enumerate(other.coeffs):
                rem[shift + i] -= f * b
            rem.pop()
            while rem and rem[-1] == 0:
                rem.pop()
        return UniPoly(q), UniPoly(rem)

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def __mod__(self, other):
        return divmod(self, other)[1]

    def __call__(self, x):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + (c if isinstance(x, Fraction) or isinstance(x, int) else float(c))
        return acc

    def eval_exact(self, x) -> Fraction:
        x = _frac(x)
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def derivative(self):
        return UniPoly([i * c for i, c in enumerate(self.coeffs)][1:])

    def monic(self):
        return self if self.is_zero() else UniPoly([c / self.lc for c in self.coeffs])

    def order_at_zero(self) -> int:
        for i, c in enumerate(self.coeffs):
            if c:
                return i
        raise DegenerateInputError("zero polynomial has infinite order")

    def content(self) -> Fraction:
        """Positive rational c with self/c primitive with integer coefficients."""
        if self.is_zero():
            return Fraction(0)
        den = reduce(math.lcm, (c.denominator for c in self.coeffs))
        num = abs(reduce(math.gcd, (c.numerator * (den // c.denominator) for c in self.coeffs)))
        return Fraction(num, den)

    def primitive(self):
        if self.is_zero():
            return self
        c = self.content()
        return UniPoly([v / c for v in self.coeffs])

    def int_coeffs(self) -> list[int]:
        assert all(c.denominator == 1 for c in self.coeffs)
        return [c.numerator for c in self.coeffs]

    def to_json(self):
        return [fmt(c) for c in self.coeffs]

    @classmethod
    def from_json(cls, data):
        return cls(Fraction(s) for s in data)


def poly_gcd(a: UniPoly, b: UniPoly) -> UniPoly:
    """Monic gcd over Q via primitive remainder sequence."""
    a, b = a.primitive(), b.primitive()
    while not b.is_zero():
        a, b = b, _prem(a, b).primitive()
    return a.monic()


def squarefree(p: UniPoly) -> UniPoly:
    if p.degree < 1:
        return p
    return divmod(p, poly_gcd(p, p.derivative()))[0]


def has_repeated_roots(p: UniPoly) -> bool:
    return p.degree >= 1 and poly_gcd(p, p.derivative()).degree > 0


def _prem(a: UniPoly, b: UniPoly) -> UniPoly:
    """Pseudo-remainder lc(b)^(deg a − deg b + 1)·a mod b, integer coefficient friendly."""
    if a.degree < b.degree:
        return a
    integral = all(c.denominator == 1 for c in a.coeffs + b.coeffs)
    rem = [c.numerator for c in a.coeffs] if integral else list(a.coeffs)
    bc = [c.numerator for c in b.coeffs] if integral else list(b.coeffs)
    lc = bc[-1]
    db = b.degree
    for _ in range(a.degree - db + 1):
        if len(rem) - 1 < db:
            rem = [lc * c for c in rem]
            continue
        top = rem[-1]
        shift = len(rem) - 1 - db
        rem = [lc * c for c in rem]
        for i, v in enumerate(bc):
            rem[shift + i] -= top * v
        rem.pop()
    return UniPoly([Fraction(c) for c in rem])


def sturm_chain(p: UniPoly) -> list[UniPoly]:
    """Sturm sequence p0 = p, p1 = p', p_{i+1} = −rem(p_{i−1}, p_i), each scaled
    by a positive constant (content removal keeps integers small)."""
    chain = [p.primitive(), p.derivative().primitive()]
    while chain[-1].degree > 0:
        a, b = chain[-2], chain[-1]
        r = _prem(a, b)
        # prem = lc(b)^e · rem, so −rem has the sign of −prem·lc(b)^e
        e = a.degree - b.degree + 1
        sign = -1 if (b.lc > 0 or e % 2 == 0) else 1
        if r.is_zero():
            break
        chain.append(UniPoly([sign * c for c in r.primitive().coeffs]))
    return chain


def _variations(chain, x: Fraction) -> int:
    values = (q.eval_exact(x) for q in chain)
    signs = [s for s in ((v > 0) - (v < 0) for v in values) if s]
    return sum(1 for u, v in zip(signs, signs[1:]) if u != v)


def count_roots(p: UniPoly, interval=(0, 1)) -> int:
    """Number of distinct real roots of p in the half-open interval (lo, hi]."""
    if p.is_zero():
        raise DegenerateInputError("count_roots of the zero polynomial")
    lo, hi = (_frac(v) for v in interval)
    if lo >= hi:
        raise DomainError("empty interval")
    sq = squarefree(p)
    if sq.degree < 1:
        return 0
    chain = sturm_chain(sq)
    return _variations(chain, lo) - _variations(chain, hi)


# ---------------------------------------------------------------- trivariate


class TriPoly:
    """Polynomial in (x, y0, y1) as a map exponent triple -> Fraction."""

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        self.terms = {k: _frac(v) for k, v in (terms or {}).items() if v}

    @classmethod
    def const(cls, v):
        return cls({(0, 0, 0): v})

    @classmethod
    def var(cls, name: str):
        return cls({{"x": (1, 0, 0), "y0": (0, 1, 0), "y1": (0, 0, 1)}[name]: 1})

    def __repr__(self):
        return f"TriPoly({len(self.terms)} terms)"

    def __eq__(self, other):
        if not isinstance(other, TriPoly):
            other = TriPoly.const(other)
        return self.terms == other.terms

    def _coerce(self, other):
        return other if isinstance(other, TriPoly) else TriPoly.const(other)

    def __add__(self, other):
        other = self._coerce(other)
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out.get(k, 0) + v
        return TriPoly(out)

    __radd__ = __add__

    def __neg__(self):
        return TriPoly({k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, TriPoly):
            c = _frac(other)
            return TriPoly({k: c * v for k, v in self.terms.items()})
        out: dict = {}
        for (a0, a1, a2), u in self.terms.items():
            for (b0, b1, b2), v in other.terms.items():
                k = (a0 + b0, a1 + b1, a2 + b2)
                out[k] = out.get(k, 0) + u * v
        return TriPoly(out)

    __rmul__ = __mul__

    def is_zero(self):
        return not self.terms

    def flip(self, s0: int = 1, s1: int = 1):
        """Substitute y0 -> s0·y0, y1 -> s1·y1."""
        return TriPoly({k: v * (s0 ** k[1]) * (s1 ** k[2]) for k, v in self.terms.items()})

    def reduce_mod(self, w0, w1):
        """Reduce modulo y_j² = 1 − w_j x²; the result is affine in y0 and in y1."""
        out = TriPoly()
        for (i, j, k), v in self.terms.items():
            term = TriPoly({(i, j % 2, k % 2): v})
            s0 = TriPoly({(0, 0, 0): 1, (2, 0, 0): -_frac(w0)})
            s1 = TriPoly({(0, 0, 0): 1, (2, 0, 0): -_frac(w1)})
            for _ in range(j // 2):
                term = term * s0
            for _ in range(k // 2):
                term = term * s1
            out = out + term
        return out

    def evaluate(self, x, y0, y1):
        return sum(v * x ** i * y0 ** j * y1 ** k for (i, j, k), v in self.terms.items())

    def evaluate_float(self, x, y0, y1) -> float:
        return sum(float(v) * x ** i * y0 ** j * y1 ** k for (i, j, k), v in self.terms.items())


def four_sign_product(F: TriPoly) -> TriPoly:
    """G = F(y0,y1)·F(y0,−y1)·F(−y0,y1)·F(−y0,−y1); even in y0 and in y1."""
    h = F * F.flip(1, -1)
    return h * h.flip(-1, 1)


def reduce_radicals(q: TriPoly, w0, w1) -> UniPoly:
    """Replace y_j² by 1 − w_j x² in a polynomial even in y0 and y1."""
    w0, w1 = _frac(w0), _frac(w1)
    odd = [k for k in q.terms if k[1] % 2 or k[2] % 2]
    if odd:
        raise ParityError(f"odd power of y0 or y1 present, e.g. exponent {odd[0]}")
    s0 = UniPoly([1, 0, -w0])
    s1 = UniPoly([1, 0, -w1])
    pow0, pow1 = {0: UniPoly([1])}, {0: UniPoly([1])}
    out = UniPoly()
    for (i, j, k), v in sorted(q.terms.items()):
        if j // 2 not in pow0:
            pow0[j // 2] = s0 ** (j // 2)
        if k // 2 not in pow1:
            pow1[k // 2] = s1 ** (k // 2)
        out = out + UniPoly([0] * i + [v]) * pow0[j // 2] * pow1[k // 2]
    return out


# ---------------------------------------------------------------- square roots


def _squarefree_split(n: int) -> tuple[int, int]:
    """n = s²·m with m squarefree; returns (s, m). Trial division, fine for the small radicands here."""
    if n == 0:
        return 0, 0
    sign = -1 if n < 0 else 1
    n = abs(n)
    s, m, d = 1, 1, 2
    while d * d <= n:
        while n % (d * d) == 0:
            n //= d * d
            s *= d
        if n % d == 0:
            n //= d
            m *= d
        d += 1
    return s, sign * m * n


class Surd:
    """Element Σ c_m √m of the real field generated by square roots of rationals.

    Keys are squarefree positive integers; the √m are linearly independent
    over Q, so the representation is canonical and zero testing is exact."""

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        self.terms = {m: _frac(c) for m, c in (terms or {}).items() if c}

    @classmethod
    def rational(cls, q):
        return cls({1: q})

    @classmethod
    def sqrt(cls, q):
        """√q for a rational q ≥ 0."""
        q = _frac(q)
        if q < 0:
            raise DomainError(f"square root of negative rational {q}")
        if q == 0:
            return cls()
        s, m = _squarefree_split(q.numerator * q.denominator)
        return cls({m: Fraction(s, q.denominator)})

    def _coerce(self, other):
        return other if isinstance(other, Surd) else Surd.rational(other)

    def __add__(self, other):
        other = self._coerce(other)
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out.get(m, 0) + c
        return Surd(out)

    __radd__ = __add__

    def __neg__(self):
        return Surd({m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, Surd):
            c = _frac(other)
            return Surd({m: c * v for m, v in self.terms.items()})
        out: dict = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                g = math.gcd(m1, m2)
                m = (m1 // g) * (m2 // g)
                out[m] = out.get(m, 0) + c1 * c2 * g
        return Surd(out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Surd):
            if set(other.terms) <= {1}:
                other = other.terms.get(1, Fraction(0))
            else:
                raise TypeError("division by an irrational Surd is not supported")
        return self * (1 / _frac(other))

    def is_zero(self):
        return not self.terms

    def __float__(self):
        return float(sum(float(c) * math.sqrt(m) for m, c in self.terms.items()))

    def interval(self, prec: int):
        with mpmath.workprec(prec):
            iv = mpmath.iv
            acc = iv.mpf(0)
            for m, c in self.terms.items():
                acc += iv.mpf(c.numerator) / c.denominator * iv.sqrt(iv.mpf(m))
            return acc

    def sign(self) -> int:
        """Exact sign: interval evaluation at doubling precision until 0 is excluded."""
        if self.is_zero():
            return 0
        prec = 64
        while True:
            box = self.interval(prec)
            if box.a > 0:
                return 1
            if box.b < 0:
                return -1
            prec *= 2
            if prec > 1 << 16:  # cannot happen for a nonzero element; guard against runaway
                raise ArithmeticError("sign undecided at 65536 bits")

    def __repr__(self):
        return " + ".join(f"{c}·√{m}" for m, c in sorted(self.terms.items())) or "0"


__all__ = [
    "Rational", "UniPoly", "TriPoly", "Surd", "count_roots", "four_sign_product",
    "reduce_radicals", "squarefree", "has_repeated_roots", "sturm_chain", "poly_gcd", "fmt",
]
