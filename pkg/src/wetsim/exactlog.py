"""Big-exponent floats: a double mantissa times a power of two with an
unbounded integer exponent.

Quantities like 4 * 2**(-2**i) or 2**(2**i + 2*i) are out of double range
long before i = 60; here the exponent is a Python int and only the mantissa
is a float.
"""
from __future__ import annotations

import functools
import math


@functools.total_ordering
class ExactLog2:
    """The value ``mant * 2**exp`` with ``0.5 <= |mant| < 1`` (or ``mant == 0``)."""

    __slots__ = ("mant", "exp")

    def __init__(self, mant: float = 0.0, exp: int = 0):
        m, e = math.frexp(float(mant))
        self.mant = m
        self.exp = int(exp) + e if m != 0.0 else 0

    @classmethod
    def pow2(cls, e: int) -> "ExactLog2":
        return cls(0.5, int(e) + 1)

    @classmethod
    def from_float(cls, x: float) -> "ExactLog2":
        if not math.isfinite(x):
            raise ValueError("ExactLog2 needs a finite value")
        return cls(x, 0)

    @classmethod
    def from_int(cls, n: int) -> "ExactLog2":
        n = int(n)
        shift = max(0, abs(n).bit_length() - 62)
        return cls(float(n >> shift) if n >= 0 else -float((-n) >> shift), shift)

    @classmethod
    def coerce(cls, x) -> "ExactLog2":
        if isinstance(x, ExactLog2):
            return x
        if isinstance(x, int):
            return cls.from_int(x)
        return cls.from_float(float(x))

    def is_zero(self) -> bool:
        return self.mant == 0.0

    def sign(self) -> int:
        return (self.mant > 0) - (self.mant < 0)

    def __mul__(self, other) -> "ExactLog2":
        o = ExactLog2.coerce(other)
        return ExactLog2(self.mant * o.mant, self.exp + o.exp)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "ExactLog2":
        o = ExactLog2.coerce(other)
        if o.mant == 0.0:
            raise ZeroDivisionError("ExactLog2 division by zero")
        return ExactLog2(self.mant / o.mant, self.exp - o.exp)

    def __rtruediv__(self, other) -> "ExactLog2":
        return ExactLog2.coerce(other) / self

    def __add__(self, other) -> "ExactLog2":
        o = ExactLog2.coerce(other)
        if o.mant == 0.0:
            return self
        if self.mant == 0.0:
            return o
        hi, lo = (self, o) if self.exp >= o.exp else (o, self)
        gap = hi.exp - lo.exp
        if gap > 1100:
            return hi
        return ExactLog2(hi.mant + math.ldexp(lo.mant, -gap), hi.exp)

    __radd__ = __add__

    def __neg__(self) -> "ExactLog2":
        return ExactLog2(-self.mant, self.exp)

    def __sub__(self, other) -> "ExactLog2":
        return self + (-ExactLog2.coerce(other))

    def __rsub__(self, other) -> "ExactLog2":
        return ExactLog2.coerce(other) - self

    def _cmp(self, other) -> int:
        o = ExactLog2.coerce(other)
        sa, sb = self.sign(), o.sign()
        if sa != sb:
            return (sa > sb) - (sa < sb)
        if sa == 0:
            return 0
        if self.exp != o.exp:
            c = 1 if self.exp > o.exp else -1
        else:
            c = (abs(self.mant) > abs(o.mant)) - (abs(self.mant) < abs(o.mant))
        return c * sa

    def __eq__(self, other):
        try:
            return self._cmp(other) == 0
        except (TypeError, ValueError):
            return NotImplemented

    def __lt__(self, other):
        return self._cmp(other) < 0

    def __hash__(self):
        return hash((self.mant, self.exp))

    def log2(self) -> float:
        if self.mant <= 0:
            raise ValueError("log2 of a non-positive ExactLog2")
        return self.exp + math.log2(self.mant)

    def ln(self) -> float:
        return self.log2() * math.log(2.0)

    def to_float(self) -> float:
        """Nearest double; 0.0 on underflow, +-inf on overflow."""
        if self.mant == 0.0:
            return 0.0
        if self.exp > 1024:
            return math.copysign(math.inf, self.mant)
        if self.exp < -1080:
            return 0.0
        return math.ldexp(self.mant, self.exp)

    def __float__(self):
        return self.to_float()

    @property
    def underflows(self) -> bool:
        return self.mant != 0.0 and self.to_float() == 0.0

    def __repr__(self):
        return f"ExactLog2({self.mant!r} * 2**{self.exp})"
