"""Exact multiplicative torsion values.

A TorsionValue is a positive real number stored as a formal product
prod base^exponent with integer bases > 1 and rational exponents.  Bases
are pairwise coprime and sorted, so two values with no residual compare
by exact equality of their factor maps.  Factorization is by trial
division up to a configurable bound; anything left over is kept as an
opaque composite base rather than ever falling back to floating point.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable

DEFAULT_FACTOR_BOUND = 10**6


class TorsionValueError(ValueError):
    pass


def factorize(n: int, bound: int = DEFAULT_FACTOR_BOUND) -> dict[int, int]:
    """Trial-division factorization; a composite remainder is kept whole."""
    if n <= 0:
        raise TorsionValueError("can only factor positive integers")
    out: dict[int, int] = {}
    m = n
    p = 2
    while p * p <= m and p <= bound:
        if m % p == 0:
            e = 0
            while m % p == 0:
                m //= p
                e += 1
            out[p] = e
        p += 1 if p == 2 else 2
    if m > 1:
        out[m] = out.get(m, 0) + 1
    return out


def _perfect_power_root(n: int) -> tuple[int, int]:
    """Return (r, k) with n = r^k and k maximal."""
    if n < 4:
        return n, 1
    for k in range(n.bit_length(), 1, -1):
        r = round(n ** (1.0 / k))
        for cand in (r - 1, r, r + 1):
            if cand > 1 and cand**k == n:
                root, mult = _perfect_power_root(cand)
                return root, mult * k
    return n, 1


def _refine_coprime(factors: dict[int, Fraction]) -> dict[int, Fraction]:
    """Split bases until pairwise coprime, with perfect powers reduced."""
    exps: dict[int, Fraction] = {}
    for b, e in factors.items():
        if e == 0 or b <= 1:
            continue
        root, k = _perfect_power_root(b)
        exps[root] = exps.get(root, Fraction(0)) + e * k
    while True:
        pair = None
        bases = sorted(b for b, e in exps.items() if e != 0)
        for i in range(len(bases)):
            for j in range(i + 1, len(bases)):
                g = math.gcd(bases[i], bases[j])
                if g > 1:
                    pair = (bases[i], bases[j], g)
                    break
            if pair:
                break
        if pair is None:
            return {b: e for b, e in exps.items() if e != 0}
        a, b, g = pair
        ea = exps.pop(a)
        eb = exps.pop(b)
        for base, e in ((g, ea + eb), (a // g, ea), (b // g, eb)):
            if base > 1 and e != 0:
                root, k = _perfect_power_root(base)
                exps[root] = exps.get(root, Fraction(0)) + e * k


class TorsionValue:
    """Formal product of base^exponent plus an optional real log residual."""

    __slots__ = ("factors", "residual_log")

    def __init__(
        self,
        factors: Iterable[tuple[int, Fraction]] | dict[int, Fraction] = (),
        residual_log: float | None = None,
    ):
        if isinstance(factors, dict):
            items = factors.items()
        else:
            items = list(factors)
        merged: dict[int, Fraction] = {}
        for base, exp in items:
            if base <= 0:
                raise TorsionValueError("bases must be positive")
            if base == 1:
                continue
            e = Fraction(exp)
            if e == 0:
                continue
            merged[base] = merged.get(base, Fraction(0)) + e
        merged = _refine_coprime(merged)
        object.__setattr__(
            self, "factors", tuple(sorted((b, e) for b, e in merged.items() if e != 0))
        )
        object.__setattr__(self, "residual_log", residual_log)

    def __setattr__(self, name, value):
        raise AttributeError("TorsionValue is immutable")

    # -- constructors ---------------------------------------------------

    @classmethod
    def one(cls) -> "TorsionValue":
        return cls()

    @classmethod
    def from_integer(cls, n: int, bound: int = DEFAULT_FACTOR_BOUND) -> "TorsionValue":
        if n <= 0:
            raise TorsionValueError("TorsionValue encodes positive numbers")
        return cls([(p, Fraction(e)) for p, e in factorize(n, bound).items()])

    @classmethod
    def from_rational(cls, q, bound: int = DEFAULT_FACTOR_BOUND) -> "TorsionValue":
        q = Fraction(q)
        if q <= 0:
            raise TorsionValueError("TorsionValue encodes positive numbers")
        num = factorize(q.numerator, bound)
        den = factorize(q.denominator, bound)
        factors = [(p, Fraction(e)) for p, e in num.items()]
        factors += [(p, Fraction(-e)) for p, e in den.items()]
        return cls(factors)

    # -- queries ----------------------------------------------------------

    @property
    def is_exact(self) -> bool:
        return self.residual_log is None

    def factor_map(self) -> dict[int, Fraction]:
        return dict(self.factors)

    def is_one(self) -> bool:
        return not self.factors and (self.residual_log in (None, 0.0))

    def log_value(self) -> float:
        out = sum(float(e) * math.log(b) for b, e in self.factors)
        if self.residual_log is not None:
            out += self.residual_log
        return out

    def approx(self) -> float:
        try:
            return math.exp(self.log_value())
        except OverflowError:
            return math.inf

    def as_fraction(self) -> Fraction:
        """Exact rational value; requires integer exponents and no residual."""
        if not self.is_exact:
            raise TorsionValueError("value has a real residual")
        out = Fraction(1)
        for b, e in self.factors:
            if e.denominator != 1:
                raise TorsionValueError("value has a non-integer exponent")
            out *= Fraction(b) ** int(e)
        return out

    # -- arithmetic ---------------------------------------------------------

    def _combine_residual(self, other: "TorsionValue", sign: int) -> float | None:
        if self.residual_log is None and other.residual_log is None:
            return None
        a = self.residual_log or 0.0
        b = other.residual_log or 0.0
        return a + sign * b

    def __mul__(self, other: "TorsionValue") -> "TorsionValue":
        return TorsionValue(
            list(self.factors) + list(other.factors),
            self._combine_residual(other, +1),
        )

    def __truediv__(self, other: "TorsionValue") -> "TorsionValue":
        inv = [(b, -e) for b, e in other.factors]
        return TorsionValue(list(self.factors) + inv, self._combine_residual(other, -1))

    def __pow__(self, exponent) -> "TorsionValue":
        e = Fraction(exponent)
        res = None if self.residual_log is None else self.residual_log * float(e)
        return TorsionValue([(b, x * e) for b, x in self.factors], res)

    def __eq__(self, other):
        if not isinstance(other, TorsionValue):
            return NotImplemented
        if self.residual_log is None and other.residual_log is None:
            return self.factors == other.factors
        return (
            self.factors == other.factors
            and self.residual_log == other.residual_log
        )

    def __hash__(self):
        return hash((self.factors, self.residual_log))

    def __repr__(self):
        body = " * ".join(f"{b}^{e}" for b, e in self.factors) or "1"
        if self.residual_log is not None:
            body += f" * exp({self.residual_log!r})"
        return f"TorsionValue({body})"

    def to_json(self) -> dict:
        out = {
            "factors": {str(b): str(e) for b, e in self.factors},
            "decimal": format(self.approx(), ".17g"),
        }
        if self.residual_log is not None:
            out["residual_log"] = format(self.residual_log, ".17g")
        return out
