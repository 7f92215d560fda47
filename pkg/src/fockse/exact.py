"""Exact rational arithmetic, combinatorics and exponential-polynomials.

Rationals are :class:`fractions.Fraction`.  An :class:`ExpPolynomial` is a
finite sum ``sum_j c_j t**m_j exp(-r_j t)`` with rational ``c_j`` and ``r_j``
and it is closed under the operations needed to integrate products of
exponentials exactly (sums, products, powers, derivatives and the two
antiderivatives ``int_0^x`` and ``int_x^oo``).
"""
from __future__ import annotations

import math
import numbers
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Iterator, Mapping

__all__ = [
    "Fraction",
    "as_rational",
    "harmonic",
    "multinomial",
    "compositions",
    "hyp2f1_terminating",
    "ExpPolynomial",
    "DivergentIntegralError",
]


class DivergentIntegralError(ValueError):
    """Raised when an integral to infinity has a non-decaying term."""


def as_rational(x) -> Fraction:
    """Convert ``x`` to an exact :class:`Fraction`.

    Integers, fractions and strings (``"3/7"``, ``"0.25"``) convert exactly.
    Floats are read through their shortest decimal representation so that
    ``0.2`` becomes ``1/5`` rather than the nearest binary fraction.
    Non-finite values raise ``ValueError``.
    """
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("booleans are not rates")
    if isinstance(x, numbers.Integral):
        return Fraction(int(x))
    if isinstance(x, str):
        return Fraction(x.strip())
    if isinstance(x, numbers.Rational):
        return Fraction(x.numerator, x.denominator)
    if isinstance(x, numbers.Real):
        xf = float(x)
        if not math.isfinite(xf):
            raise ValueError(f"cannot represent {x!r} as a rational")
        return Fraction(repr(xf))
    raise TypeError(f"cannot represent {type(x).__name__} as a rational")


@lru_cache(maxsize=None)
def _harmonic(n: int, order: int) -> Fraction:
    if n == 0:
        return Fraction(0)
    return _harmonic(n - 1, order) + Fraction(1, n**order)


def harmonic(n: int, order: int = 1) -> Fraction:
    """Generalized harmonic number ``H_{n,order}``; ``H_0 = 0``."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    if order < 1:
        raise ValueError("order must be a positive integer")
    # iterative fill keeps the cache recursion shallow
    for j in range(0, n + 1, 256):
        _harmonic(j, order)
    return _harmonic(n, order)


def multinomial(parts: Iterable[int]) -> int:
    parts = list(parts)
    if any(p < 0 for p in parts):
        raise ValueError("parts must be nonnegative")
    out = math.factorial(sum(parts))
    for p in parts:
        out //= math.factorial(p)
    return out


def compositions(total: int, nparts: int) -> Iterator[tuple[int, ...]]:
    """All weak compositions of ``total`` into ``nparts`` parts, lexicographic."""
    if total < 0 or nparts < 0:
        return
    if nparts == 0:
        if total == 0:
            yield ()
        return
    if nparts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in compositions(total - first, nparts - 1):
            yield (first,) + rest


def hyp2f1_terminating(b: int, c: int, x) -> Fraction:
    """Exact ``2F1(1, b; c; x)`` for integer ``b <= 0``.

    With ``a = 1`` the Pochhammer ``(1)_j`` cancels ``j!`` and the series is
    ``sum_j (b)_j / (c)_j x**j``, which stops after ``-b`` terms.
    """
    if int(b) != b or b > 0:
        raise ValueError("b must be a nonpositive integer")
    if int(c) != c or c <= 0:
        raise ValueError("c must be a positive integer (series has a pole otherwise)")
    b, c = int(b), int(c)
    x = as_rational(x)
    total = Fraction(0)
    term = Fraction(1)
    for j in range(-b + 1):
        total += term
        term = term * (b + j) / (c + j) * x
    return total


Key = tuple[int, Fraction]


class ExpPolynomial:
    """Exact sum of terms ``c * t**m * exp(-r*t)``.

    Terms are stored as ``{(m, r): c}``; equal ``(m, r)`` pairs are merged and
    zero coefficients dropped, so equality of two instances is structural.
    Rates may be any rational, but integration to infinity requires every
    rate to be positive.
    """

    __slots__ = ("_terms",)

    def __init__(self, terms: Mapping[Key, object] | Iterable[tuple[object, int, object]] = ()):
        acc: dict[Key, Fraction] = {}
        items = terms.items() if isinstance(terms, Mapping) else (((m, r), c) for c, m, r in terms)
        for (m, r), c in items:
            if int(m) != m or m < 0:
                raise ValueError("powers must be nonnegative integers")
            key = (int(m), as_rational(r))
            acc[key] = acc.get(key, Fraction(0)) + as_rational(c)
        self._terms = {k: v for k, v in acc.items() if v != 0}

    # construction helpers
    @classmethod
    def exp(cls, rate, coeff=1, power: int = 0) -> "ExpPolynomial":
        return cls({(power, rate): coeff})

    @classmethod
    def constant(cls, value) -> "ExpPolynomial":
        return cls({(0, 0): value})

    @classmethod
    def monomial(cls, power: int, coeff=1) -> "ExpPolynomial":
        return cls({(power, 0): coeff})

    @property
    def terms(self) -> dict[Key, Fraction]:
        return dict(self._terms)

    def __len__(self) -> int:
        return len(self._terms)

    def __iter__(self):
        for (m, r), c in sorted(self._terms.items()):
            yield c, m, r

    def __eq__(self, other) -> bool:
        if isinstance(other, ExpPolynomial):
            return self._terms == other._terms
        if isinstance(other, (int, Fraction)):
            return self == ExpPolynomial.constant(other)
        return NotImplemented

    def __hash__(self):
        return hash(frozenset(self._terms.items()))

    def __repr__(self) -> str:
        if not self._terms:
            return "ExpPolynomial(0)"
        parts = [f"{c}*t^{m}*exp(-{r} t)" for c, m, r in self]
        return "ExpPolynomial(" + " + ".join(parts) + ")"

    def is_zero(self) -> bool:
        return not self._terms

    # ring operations
    @staticmethod
    def _coerce(other) -> "ExpPolynomial":
        if isinstance(other, ExpPolynomial):
            return other
        return ExpPolynomial.constant(as_rational(other))

    def __add__(self, other):
        other = self._coerce(other)
        acc = dict(self._terms)
        for k, v in other._terms.items():
            acc[k] = acc.get(k, Fraction(0)) + v
        return ExpPolynomial(acc)

    __radd__ = __add__

    def __neg__(self):
        return ExpPolynomial({k: -v for k, v in self._terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, ExpPolynomial):
            c = as_rational(other)
            return ExpPolynomial({k: v * c for k, v in self._terms.items()})
        acc: dict[Key, Fraction] = {}
        for (m1, r1), c1 in self._terms.items():
            for (m2, r2), c2 in other._terms.items():
                k = (m1 + m2, r1 + r2)
                acc[k] = acc.get(k, Fraction(0)) + c1 * c2
        return ExpPolynomial(acc)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if int(n) != n or n < 0:
            raise ValueError("only nonnegative integer powers")
        result = ExpPolynomial.constant(1)
        base = self
        n = int(n)
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def times_t(self, power: int = 1) -> "ExpPolynomial":
        return ExpPolynomial({(m + power, r): c for (m, r), c in self._terms.items()})

    # calculus
    def derivative(self) -> "ExpPolynomial":
        acc: dict[Key, Fraction] = {}
        for (m, r), c in self._terms.items():
            if m:
                acc[(m - 1, r)] = acc.get((m - 1, r), Fraction(0)) + c * m
            if r:
                acc[(m, r)] = acc.get((m, r), Fraction(0)) - c * r
        return ExpPolynomial(acc)

    def integral_to_inf(self) -> Fraction:
        """Exact ``int_0^oo f(t) dt`` using ``int t^m e^{-rt} = m!/r^{m+1}``."""
        total = Fraction(0)
        for (m, r), c in self._terms.items():
            if r <= 0:
                raise DivergentIntegralError(f"divergent: term t^{m} exp(-{r} t)")
            total += c * math.factorial(m) / r ** (m + 1)
        return total

    def moment(self, j: int) -> Fraction:
        """``int_0^oo t**j f(t) dt``."""
        return self.times_t(j).integral_to_inf()

    def tail(self) -> "ExpPolynomial":
        """``x -> int_x^oo f(t) dt`` as a new ExpPolynomial in ``x``."""
        acc: dict[Key, Fraction] = {}
        for (m, r), c in self._terms.items():
            if r <= 0:
                raise DivergentIntegralError(f"divergent: term t^{m} exp(-{r} t)")
            # int_x^oo t^m e^{-rt} dt = e^{-rx} sum_j m!/(j! r^{m-j+1}) x^j
            mf = math.factorial(m)
            for j in range(m + 1):
                k = (j, r)
                acc[k] = acc.get(k, Fraction(0)) + c * Fraction(mf, math.factorial(j)) / r ** (m - j + 1)
        return ExpPolynomial(acc)

    def cumulative(self) -> "ExpPolynomial":
        """``x -> int_0^x f(t) dt``; zero-rate terms integrate to powers of x."""
        acc: dict[Key, Fraction] = {}
        decaying = {}
        for (m, r), c in self._terms.items():
            if r == 0:
                k = (m + 1, Fraction(0))
                acc[k] = acc.get(k, Fraction(0)) + c / (m + 1)
            else:
                decaying[(m, r)] = c
        if decaying:
            part = ExpPolynomial(decaying)
            const = part.integral_to_inf()
            acc[(0, Fraction(0))] = acc.get((0, Fraction(0)), Fraction(0)) + const
            for k, v in part.tail()._terms.items():
                acc[k] = acc.get(k, Fraction(0)) - v
        return ExpPolynomial(acc)

    def antiderivative_from(self, lower: str) -> "ExpPolynomial":
        """``int_x^oo f`` when ``lower == "x"`` or ``int_0^x f`` when ``lower == "0"``."""
        if lower == "x":
            return self.tail()
        if lower == "0":
            return self.cumulative()
        raise ValueError("lower must be 'x' (integrate x..oo) or '0' (integrate 0..x)")

    # evaluation
    def at_zero(self) -> Fraction:
        return sum((c for (m, r), c in self._terms.items() if m == 0), Fraction(0))

    def __call__(self, t):
        """Floating-point value at ``t`` (scalar or numpy array)."""
        import numpy as np

        t = np.asarray(t, dtype=float)
        out = np.zeros_like(t)
        for (m, r), c in self._terms.items():
            out = out + float(c) * t**m * np.exp(-float(r) * t)
        return out if out.ndim else float(out)

    def max_power(self) -> int:
        return max((m for m, _ in self._terms), default=0)

    def rates(self) -> set[Fraction]:
        return {r for _, r in self._terms}
