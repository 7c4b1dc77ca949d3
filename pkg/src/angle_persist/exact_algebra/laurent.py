"""Laurent polynomials over a coefficient field.

The ring k[t^-1, t] is a PID whose units are the monomials c*t^k.  Euclidean
division uses the *span* (max degree minus min degree) as the norm, which is
the same as normalizing both operands into k[t] with a nonzero constant term
and dividing there.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Mapping

from ..errors import FieldMismatchError
from .field import Field


class LaurentPoly:
    """Immutable Laurent polynomial ``sum c_n t^n`` with exact coefficients."""

    __slots__ = ("field", "_c", "_hash")

    def __init__(self, field: Field, coeffs: Mapping[int, object] | None = None):
        self.field = field
        c = {}
        if coeffs:
            for e, v in coeffs.items():
                v = field(v) if not _native(field, v) else field.norm(v)
                if v:
                    c[int(e)] = v
        self._c = c
        self._hash = None

    @classmethod
    def _raw(cls, field: Field, c: dict) -> "LaurentPoly":
        obj = cls.__new__(cls)
        obj.field = field
        obj._c = c
        obj._hash = None
        return obj

    # -- constructors -----------------------------------------------------
    @classmethod
    def zero(cls, field: Field) -> "LaurentPoly":
        return cls._raw(field, {})

    @classmethod
    def one(cls, field: Field) -> "LaurentPoly":
        return cls._raw(field, {0: field.one})

    @classmethod
    def monomial(cls, field: Field, coeff, exp: int = 0) -> "LaurentPoly":
        return cls(field, {exp: coeff})

    @classmethod
    def t(cls, field: Field) -> "LaurentPoly":
        return cls._raw(field, {1: field.one})

    @classmethod
    def from_coeffs(cls, field: Field, coeffs: Iterable, low: int = 0) -> "LaurentPoly":
        """Build from a coefficient list starting at exponent ``low``."""
        return cls(field, {low + i: c for i, c in enumerate(coeffs)})

    # -- basic data -------------------------------------------------------
    @property
    def coeffs(self) -> dict:
        return dict(self._c)

    def items(self):
        return sorted(self._c.items())

    def coeff(self, e: int):
        return self._c.get(e, self.field.zero)

    def __bool__(self):
        return bool(self._c)

    def is_zero(self) -> bool:
        return not self._c

    @property
    def mindeg(self) -> int:
        if not self._c:
            raise ValueError("zero polynomial has no degree")
        return min(self._c)

    @property
    def maxdeg(self) -> int:
        if not self._c:
            raise ValueError("zero polynomial has no degree")
        return max(self._c)

    @property
    def span(self) -> int:
        return self.maxdeg - self.mindeg

    def is_unit(self) -> bool:
        return len(self._c) == 1

    def is_one(self) -> bool:
        return self._c == {0: self.field.one}

    @property
    def leading_coeff(self):
        return self._c[self.maxdeg]

    def trace(self):
        """Constant coefficient (the group-ring trace)."""
        return self.coeff(0)

    # -- arithmetic -------------------------------------------------------
    def _check(self, other) -> "LaurentPoly":
        if isinstance(other, LaurentPoly):
            if other.field != self.field:
                raise FieldMismatchError(f"{self.field!r} vs {other.field!r}")
            return other
        if isinstance(other, Field):
            raise TypeError("cannot combine a field with a polynomial")
        return LaurentPoly(self.field, {0: other})

    def __add__(self, other):
        other = self._check(other)
        F = self.field
        c = dict(self._c)
        for e, v in other._c.items():
            s = F.norm(c.get(e, 0) + v)
            if s:
                c[e] = s
            else:
                c.pop(e, None)
        return LaurentPoly._raw(F, c)

    __radd__ = __add__

    def __neg__(self):
        F = self.field
        return LaurentPoly._raw(F, {e: F.norm(-v) for e, v in self._c.items()})

    def __sub__(self, other):
        return self + (-self._check(other))

    def __rsub__(self, other):
        return self._check(other) - self

    def __mul__(self, other):
        other = self._check(other)
        F = self.field
        c: dict = {}
        for e1, v1 in self._c.items():
            for e2, v2 in other._c.items():
                e = e1 + e2
                c[e] = c.get(e, 0) + v1 * v2
        c = {e: F.norm(v) for e, v in c.items()}
        return LaurentPoly._raw(F, {e: v for e, v in c.items() if v})

    __rmul__ = __mul__

    def shift(self, k: int) -> "LaurentPoly":
        """Multiply by ``t**k``."""
        return LaurentPoly._raw(self.field, {e + k: v for e, v in self._c.items()})

    def scale(self, s) -> "LaurentPoly":
        F = self.field
        s = F(s) if not _native(F, s) else F.norm(s)
        if not s:
            return LaurentPoly.zero(F)
        return LaurentPoly._raw(F, {e: F.norm(v * s) for e, v in self._c.items()})

    def __pow__(self, n: int):
        if n < 0:
            return self.unit_inverse() ** (-n)
        out = LaurentPoly.one(self.field)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def unit_inverse(self) -> "LaurentPoly":
        if not self.is_unit():
            raise ValueError(f"{self} is not a unit")
        (e, v), = self._c.items()
        return LaurentPoly._raw(self.field, {-e: self.field.inv(v)})

    def divmod(self, other: "LaurentPoly"):
        """Euclidean division: ``self = q*other + r`` with ``span(r) < span(other)`` or r = 0."""
        other = self._check(other)
        if not other:
            raise ZeroDivisionError("division by the zero polynomial")
        F = self.field
        if not self._c:
            return LaurentPoly.zero(F), LaurentPoly.zero(F)
        lo_a, lo_b = self.mindeg, other.mindeg
        # work in k[t] on shifted copies
        a = {e - lo_a: v for e, v in self._c.items()}
        b = {e - lo_b: v for e, v in other._c.items()}
        db = max(b)
        inv_lb = F.inv(b[db])
        q: dict = {}
        while a:
            da = max(a)
            if da < db:
                break
            coef = F.norm(a[da] * inv_lb)
            s = da - db
            q[s] = coef
            for e, v in b.items():
                k = e + s
                nv = F.norm(a.get(k, 0) - coef * v)
                if nv:
                    a[k] = nv
                else:
                    a.pop(k, None)
        quo = LaurentPoly._raw(F, {e + lo_a - lo_b: v for e, v in q.items()})
        rem = LaurentPoly._raw(F, {e + lo_a: v for e, v in a.items()})
        return quo, rem

    def __floordiv__(self, other):
        return self.divmod(other)[0]

    def __mod__(self, other):
        return self.divmod(other)[1]

    def divides(self, other: "LaurentPoly") -> bool:
        """True when ``self`` divides ``other``."""
        if not self:
            return not other
        return not other.divmod(self)[1]

    def exact_div(self, other: "LaurentPoly") -> "LaurentPoly":
        q, r = self.divmod(other)
        if r:
            raise ArithmeticError(f"{other} does not divide {self}")
        return q

    def involution(self) -> "LaurentPoly":
        """``sum conj(a_n) t^-n``."""
        F = self.field
        return LaurentPoly._raw(F, {-e: F.conj(v) for e, v in self._c.items()})

    def unit_normalize(self) -> "LaurentPoly":
        """Unique associate that is monic in t with minimal degree zero."""
        if not self._c:
            return self
        return self * self.normalizing_unit()

    def normalizing_unit(self) -> "LaurentPoly":
        """The unit ``u`` with ``u * self`` canonical."""
        F = self.field
        return LaurentPoly._raw(F, {-self.mindeg: F.inv(self.leading_coeff)})

    def evaluate(self, x):
        """Evaluate at a nonzero scalar; coefficients are cast through ``complex``
        when ``x`` is complex, otherwise kept exact."""
        if isinstance(x, complex) or isinstance(x, float):
            return sum(complex(_as_number(v)) * x ** e for e, v in self._c.items()) if self._c else 0j
        F = self.field
        x = F(x)
        total = F.zero
        for e, v in self._c.items():
            total = F.norm(total + v * (x ** e if e >= 0 else F.inv(x) ** (-e)))
        return total

    # -- comparison / display --------------------------------------------
    def __eq__(self, other):
        if isinstance(other, LaurentPoly):
            return self.field == other.field and self._c == other._c
        if isinstance(other, (int, Fraction)):
            return self == LaurentPoly(self.field, {0: other})
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.field, tuple(sorted(self._c.items()))))
        return self._hash

    def __repr__(self):
        return f"LaurentPoly({self})"

    def __str__(self):
        if not self._c:
            return "0"
        parts = []
        for e, v in sorted(self._c.items(), reverse=True):
            mono = "" if e == 0 else ("t" if e == 1 else f"t^{e}")
            if mono == "":
                s = str(v)
            elif v == 1:
                s = mono
            elif self.field.p is None and v == -1:
                s = "-" + mono
            else:
                s = f"{v}*{mono}"
            parts.append(s)
        out = parts[0]
        for s in parts[1:]:
            out += " - " + s[1:] if s.startswith("-") else " + " + s
        return out



def _native(F: Field, v) -> bool:
    if F.p is None:
        return isinstance(v, Fraction)
    return type(v) is int


def _as_number(v):
    return float(v) if isinstance(v, Fraction) else v


def laurent_arith(a: LaurentPoly, b: LaurentPoly | None, op: str) -> LaurentPoly:
    """Single entry point for ``add``, ``mul``, ``involution`` and ``unit_normalize``."""
    if op == "add":
        return a + b
    if op == "mul":
        return a * b
    if op == "involution":
        return a.involution()
    if op == "unit_normalize":
        return a.unit_normalize()
    raise ValueError(f"unknown op {op!r}")
