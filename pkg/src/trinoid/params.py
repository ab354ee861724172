"""Trinoid surface parameters (w0, w1, r̂0, r̂1, p)."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational, Real

from .errors import DomainError, SignAssumptionError

FIELDS = ("w0", "w1", "r0h", "r1h", "p")


def parse_rational(text: str, allow_decimal: bool = False) -> Fraction:
    """Parse "p/q" (or an integer). Decimals only when ``allow_decimal``."""
    s = text.strip()
    if not allow_decimal and any(ch in s for ch in ".eE"):
        raise DomainError(f"decimal value {s!r} not accepted; give an exact p/q")
    try:
        return Fraction(s)
    except (ValueError, ZeroDivisionError) as exc:
        raise DomainError(f"cannot parse {s!r} as a rational") from exc


def fmt_rational(q) -> str | float:
    if isinstance(q, Rational):
        q = Fraction(q)
        return f"{q.numerator}/{q.denominator}"
    return float(q)


@dataclass(frozen=True)
class TrinoidParams:
    """Θ = (w0, w1, r̂0, r̂1, p). Exact (Fraction) entries for certification;
    float entries are tolerated by the numerical routines."""

    w0: Real
    w1: Real
    r0h: Real
    r1h: Real
    p: Real

    @classmethod
    def parse(cls, text: str, allow_decimal: bool = False) -> "TrinoidParams":
        parts = text.split(",")
        if len(parts) != 5:
            raise DomainError("expected five comma separated values w0,w1,r0h,r1h,p")
        return cls(*(parse_rational(s, allow_decimal) for s in parts))

    @classmethod
    def of(cls, *values) -> "TrinoidParams":
        return cls(*(Fraction(v) if isinstance(v, (int, str, Fraction)) else v for v in values))

    def astuple(self):
        return (self.w0, self.w1, self.r0h, self.r1h, self.p)

    @property
    def is_exact(self) -> bool:
        return all(isinstance(v, Rational) for v in self.astuple())

    def require_exact(self):
        if not self.is_exact:
            raise DomainError("exact rational parameters required")

    def check(self, t_max=1):
        """Raise unless p > 0 and w_k·t < 1 on (0, t_max]."""
        if not self.p > 0:
            raise SignAssumptionError(f"p must be positive, got {self.p}")
        for name, w in (("w0", self.w0), ("w1", self.w1)):
            if w * t_max >= 1:
                raise DomainError(f"{name}·t ≥ 1 on (0,{t_max}]: exponent not real")

    def shifted(self, index: int, delta) -> "TrinoidParams":
        vals = list(self.astuple())
        vals[index] = vals[index] + delta
        return TrinoidParams(*vals)

    def to_json(self):
        return {k: fmt_rational(v) for k, v in zip(FIELDS, self.astuple())}
