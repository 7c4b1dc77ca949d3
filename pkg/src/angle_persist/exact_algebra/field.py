"""Coefficient fields: the rationals and prime fields F_p.

Elements are plain Python values: ``fractions.Fraction`` over Q, ``int`` in
``range(p)`` over F_p.  A :class:`Field` knows how to coerce, normalize and
invert them; arithmetic itself uses the native operators followed by
:meth:`Field.norm`.
"""

from __future__ import annotations

from fractions import Fraction
from numbers import Rational


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    if p % 2 == 0:
        return p == 2
    f = 3
    while f * f <= p:
        if p % f == 0:
            return False
        f += 2
    return True


class Field:
    __slots__ = ("p",)

    def __init__(self, p: int | None = None):
        if p is not None:
            if not isinstance(p, int) or not _is_prime(p):
                raise ValueError(f"F_p requires a prime modulus, got {p!r}")
        self.p = p

    @classmethod
    def rationals(cls) -> "Field":
        return cls(None)

    @classmethod
    def prime(cls, p: int = 2) -> "Field":
        return cls(p)

    @classmethod
    def parse(cls, spec: str) -> "Field":
        """Parse ``"q"`` or ``"fp:PRIME"`` (``"fp"`` alone means p = 2)."""
        s = spec.strip().lower()
        if s in ("q", "qq", "rationals"):
            return cls.rationals()
        if s == "fp":
            return cls.prime(2)
        if s.startswith("fp:"):
            try:
                p = int(s[3:])
            except ValueError:
                raise ValueError(f"bad field spec {spec!r}") from None
            return cls.prime(p)
        raise ValueError(f"bad field spec {spec!r}; expected 'q' or 'fp:PRIME'")

    @property
    def is_rational(self) -> bool:
        return self.p is None

    @property
    def zero(self):
        return Fraction(0) if self.p is None else 0

    @property
    def one(self):
        return Fraction(1) if self.p is None else 1

    def __call__(self, x):
        if self.p is None:
            return Fraction(x)
        if isinstance(x, Fraction) or (isinstance(x, Rational) and not isinstance(x, int)):
            x = Fraction(x)
            return (x.numerator * pow(x.denominator, -1, self.p)) % self.p
        return int(x) % self.p

    def norm(self, x):
        return x if self.p is None else x % self.p

    def inv(self, x):
        if not x:
            raise ZeroDivisionError("inverse of zero")
        if self.p is None:
            return Fraction(1) / x
        return pow(x, -1, self.p)

    def conj(self, x):
        # Q and F_p carry the trivial conjugation.
        return x

    def spec(self) -> str:
        return "q" if self.p is None else f"fp:{self.p}"

    def __eq__(self, other):
        return isinstance(other, Field) and self.p == other.p

    def __hash__(self):
        return hash(("Field", self.p))

    def __repr__(self):
        return "Q" if self.p is None else f"F_{self.p}"


QQ = Field.rationals()
GF2 = Field.prime(2)
