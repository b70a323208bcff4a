"""Shift-polynomial coefficient ring over exact rationals.

Elements of :class:`CoeffPoly` are sparse polynomials in an infinite free
family of generators: the lower dressing coefficients ``w_i`` (i >= 1), the
upper dressing coefficients ``wt_i`` (i >= 0) and the band coefficients
``u_j``, each tagged with an x-derivative order and an integer lattice
shift.  The ring carries two commuting operations besides arithmetic:

* ``shift(k)`` relabels every generator's shift tag by +k (the operator
  ``S^k`` with ``(S f)(x) = f(x + eps)``),
* ``derive()`` is the Leibniz derivation raising derivative orders.

The single permitted division is by ``wt_0`` and its shifts: exponents on
the underived ``wt_0`` generators may be any integer, so ``wt_0^-1`` is an
honest ring element and ``wt_0 * wt_0^-1 == 1``.
"""

from __future__ import annotations

from typing import Iterable

from .errors import MissingGenerator, NotInvertible, ZeroDenominator
from .rational import RAT_ONE, RAT_ZERO, Rat, is_rat, rat_str

FAMILIES = ("w", "wt", "u")


class Gen:
    """One generator: (family, index, derivative order, lattice shift)."""

    __slots__ = ("family", "index", "der", "shift")

    def __init__(self, family: str, index: int, der: int = 0, shift: int = 0):
        if family not in FAMILIES:
            raise ValueError(f"unknown generator family {family!r}")
        if family == "w" and index < 1:
            raise ValueError("w generators are indexed from 1")
        if family == "wt" and index < 0:
            raise ValueError("wt generators are indexed from 0")
        if der < 0:
            raise ValueError("negative derivative order")
        self.family = family
        self.index = index
        self.der = der
        self.shift = shift

    def key(self):
        return (self.family, self.index, self.der, self.shift)

    def shifted(self, k: int) -> "Gen":
        return Gen(self.family, self.index, self.der, self.shift + k)

    def derived(self) -> "Gen":
        return Gen(self.family, self.index, self.der + 1, self.shift)

    @property
    def invertible(self) -> bool:
        return self.family == "wt" and self.index == 0 and self.der == 0

    def __eq__(self, other):
        return isinstance(other, Gen) and self.key() == other.key()

    def __lt__(self, other):
        return self.key() < other.key()

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        name = f"{self.family}{self.index}"
        if self.der == 1:
            name += "'"
        elif self.der > 1:
            name += f"^({self.der})"
        return f"{name}[{self.shift}]"


def w(i: int, shift: int = 0, der: int = 0) -> "CoeffPoly":
    return CoeffPoly.gen(Gen("w", i, der, shift))


def wt(i: int, shift: int = 0, der: int = 0) -> "CoeffPoly":
    return CoeffPoly.gen(Gen("wt", i, der, shift))


def u(j: int, shift: int = 0, der: int = 0) -> "CoeffPoly":
    return CoeffPoly.gen(Gen("u", j, der, shift))


def _mono_mul(a, b):
    exps = dict(a)
    for g, e in b:
        exps[g] = exps.get(g, 0) + e
    return tuple(sorted((g, e) for g, e in exps.items() if e != 0))


class CoeffPoly:
    """Sparse polynomial; ``terms`` maps monomial -> rational coefficient.

    A monomial is a sorted tuple of (Gen, exponent) pairs with nonzero
    exponents.  Negative exponents are legal only on invertible generators.
    """

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        self.terms = {}
        if terms:
            for mono, coeff in terms.items():
                if coeff == 0:
                    continue
                for g, e in mono:
                    if e < 0 and not g.invertible:
                        raise ValueError(f"negative exponent on {g!r}")
                self.terms[mono] = coeff

    @classmethod
    def const(cls, value) -> "CoeffPoly":
        value = Rat(value) if not is_rat(value) else value
        return cls({(): value}) if value != 0 else cls()

    @classmethod
    def gen(cls, g: Gen, exponent: int = 1) -> "CoeffPoly":
        return cls({((g, exponent),): RAT_ONE})

    @classmethod
    def zero(cls) -> "CoeffPoly":
        return cls()

    @classmethod
    def one(cls) -> "CoeffPoly":
        return cls.const(1)

    def is_zero(self) -> bool:
        return not self.terms

    def constant_term(self):
        return self.terms.get((), RAT_ZERO)

    def is_constant(self) -> bool:
        return all(m == () for m in self.terms)

    def generators(self) -> set:
        out = set()
        for mono in self.terms:
            for g, _ in mono:
                out.add(g)
        return out

    def _coerce(self, other):
        if isinstance(other, CoeffPoly):
            return other
        if is_rat(other):
            return CoeffPoly.const(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        terms = dict(self.terms)
        for mono, coeff in other.terms.items():
            acc = terms.get(mono, RAT_ZERO) + coeff
            if acc == 0:
                terms.pop(mono, None)
            else:
                terms[mono] = acc
        out = CoeffPoly()
        out.terms = terms
        return out

    __radd__ = __add__

    def __neg__(self):
        out = CoeffPoly()
        out.terms = {m: -c for m, c in self.terms.items()}
        return out

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        terms = {}
        for ma, ca in self.terms.items():
            for mb, cb in other.terms.items():
                mono = _mono_mul(ma, mb)
                acc = terms.get(mono, RAT_ZERO) + ca * cb
                if acc == 0:
                    terms.pop(mono, None)
                else:
                    terms[mono] = acc
        out = CoeffPoly()
        out.terms = terms
        return out

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        out = CoeffPoly.one()
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __eq__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def shift(self, k: int) -> "CoeffPoly":
        if k == 0:
            return self
        out = CoeffPoly()
        out.terms = {
            tuple(sorted((g.shifted(k), e) for g, e in mono)): c
            for mono, c in self.terms.items()
        }
        return out

    def derive(self) -> "CoeffPoly":
        out = CoeffPoly.zero()
        for mono, coeff in self.terms.items():
            for i, (g, e) in enumerate(mono):
                rest = mono[:i] + mono[i + 1 :]
                bumped = _mono_mul(rest, ((g, e - 1), (g.derived(), 1)))
                out = out + CoeffPoly({bumped: coeff * Rat(e)})
        return out

    def inverse(self) -> "CoeffPoly":
        """Inverse of a single invertible monomial."""
        if len(self.terms) != 1:
            raise NotInvertible("only monomials of wt_0 generators invert")
        ((mono, coeff),) = self.terms.items()
        if coeff == 0:
            raise NotInvertible("zero has no inverse")
        for g, _ in mono:
            if not g.invertible:
                raise NotInvertible(f"{g!r} is not invertible")
        inv_mono = tuple((g, -e) for g, e in mono)
        return CoeffPoly({inv_mono: RAT_ONE / coeff})

    def evaluate(self, assign: dict):
        """Ring homomorphism into the rationals; ``assign`` maps Gen -> Rat."""
        total = RAT_ZERO
        for mono, coeff in self.terms.items():
            val = coeff
            for g, e in mono:
                if g not in assign:
                    raise MissingGenerator(f"no value for {g!r}")
                gval = assign[g]
                if e < 0:
                    if gval == 0:
                        raise ZeroDenominator(f"{g!r} assigned zero")
                    val = val * Rat(1) / (gval ** (-e))
                else:
                    val = val * gval ** e
            total = total + val
        return total

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for mono, coeff in sorted(self.terms.items(), key=lambda t: t[0]):
            factors = [] if coeff == 1 and mono else [rat_str(coeff)]
            for g, e in mono:
                factors.append(f"{g!r}" if e == 1 else f"{g!r}^{e}")
            parts.append("*".join(factors) or rat_str(coeff))
        return " + ".join(parts)


# Dispatch helpers so plain rationals can stand in for ring elements in
# generic code (operator coefficients, series coefficients, time
# polynomials over any base).

def rshift(c, k: int):
    return c.shift(k) if hasattr(c, "shift") else c


def rderive(c):
    if hasattr(c, "derive"):
        return c.derive()
    return RAT_ZERO


def ris_zero(c) -> bool:
    return c.is_zero() if hasattr(c, "is_zero") else c == 0


def rinverse(c):
    if hasattr(c, "inverse"):
        return c.inverse()
    if c == 0:
        raise NotInvertible("zero has no inverse")
    return RAT_ONE / c
