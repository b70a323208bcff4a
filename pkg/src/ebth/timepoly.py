"""Truncated multivariate polynomials in the hierarchy times.

Variables are keyed by ``('t', alpha, n)`` for a hierarchy time, or by
``('aux', name)`` for an auxiliary nilpotent used in first-order bilinear
checks.  The total degree in the 't' variables is capped at ``cap``;
every 'aux' variable is capped individually at degree 1.  Truncation is a
ring quotient, so arithmetic stays exact and associative at any cap.

Coefficients live in an arbitrary commutative base ring (lattice jets,
shift polynomials, or plain rationals); the base operations ``shift`` and
``derive`` are lifted coefficientwise.
"""

from __future__ import annotations

from .errors import NotInvertible, VariableSetMismatch
from .rational import RAT_ONE, RAT_ZERO, Rat, binomial, is_rat
from .ring import rderive, rinverse, ris_zero, rshift


def tvar(alpha: int, n: int):
    return ("t", alpha, n)


def avar(name: str):
    return ("aux", name)


def is_tvar(key) -> bool:
    return key[0] == "t"


class TimePoly:
    __slots__ = ("vars", "cap", "terms")

    def __init__(self, vars, cap: int, terms=None):
        self.vars = tuple(sorted(vars))
        self.cap = cap
        self.terms = {}
        if terms:
            for exp, coeff in terms.items():
                if ris_zero(coeff) or not self._fits(exp):
                    continue
                self.terms[exp] = coeff

    def _fits(self, exp) -> bool:
        tdeg = 0
        for key, e in zip(self.vars, exp):
            if is_tvar(key):
                tdeg += e
            elif e > 1:
                return False
        return tdeg <= self.cap

    def tdeg(self, exp) -> int:
        return sum(e for key, e in zip(self.vars, exp) if is_tvar(key))

    @classmethod
    def const(cls, vars, cap: int, value) -> "TimePoly":
        zero = (0,) * len(tuple(vars))
        return cls(vars, cap, {zero: value})

    @classmethod
    def zero(cls, vars, cap: int) -> "TimePoly":
        return cls(vars, cap)

    @classmethod
    def one(cls, vars, cap: int) -> "TimePoly":
        return cls.const(vars, cap, RAT_ONE)

    def var_monomial(self, key, coeff=RAT_ONE) -> "TimePoly":
        idx = self.vars.index(key)
        exp = tuple(1 if i == idx else 0 for i in range(len(self.vars)))
        return TimePoly(self.vars, self.cap, {exp: coeff})

    def like(self, terms) -> "TimePoly":
        return TimePoly(self.vars, self.cap, terms)

    def is_zero(self) -> bool:
        return not self.terms

    def constant_term(self):
        return self.terms.get((0,) * len(self.vars), RAT_ZERO)

    def _check(self, other: "TimePoly"):
        if self.vars != other.vars or self.cap != other.cap:
            raise VariableSetMismatch(
                f"vars/cap mismatch: {self.vars}/{self.cap} vs {other.vars}/{other.cap}"
            )

    def _coerce(self, other):
        if isinstance(other, TimePoly):
            self._check(other)
            return other
        return TimePoly.const(self.vars, self.cap, other)

    def __add__(self, other):
        other = self._coerce(other)
        terms = dict(self.terms)
        for exp, coeff in other.terms.items():
            acc = terms.get(exp, RAT_ZERO) + coeff
            if ris_zero(acc):
                terms.pop(exp, None)
            else:
                terms[exp] = acc
        out = TimePoly(self.vars, self.cap)
        out.terms = terms
        return out

    __radd__ = __add__

    def __neg__(self):
        out = TimePoly(self.vars, self.cap)
        out.terms = {e: -c for e, c in self.terms.items()}
        return out

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, TimePoly):
            out = TimePoly(self.vars, self.cap)
            for exp, coeff in self.terms.items():
                acc = coeff * other
                if not ris_zero(acc):
                    out.terms[exp] = acc
            return out
        self._check(other)
        terms = {}
        for ea, ca in self.terms.items():
            da = self.tdeg(ea)
            for eb, cb in other.terms.items():
                if da + other.tdeg(eb) > self.cap:
                    continue
                exp = tuple(x + y for x, y in zip(ea, eb))
                if not self._fits(exp):
                    continue
                acc = terms.get(exp, RAT_ZERO) + ca * cb
                if ris_zero(acc):
                    terms.pop(exp, None)
                else:
                    terms[exp] = acc
        out = TimePoly(self.vars, self.cap)
        out.terms = terms
        return out

    def __rmul__(self, other):
        return self.__mul__(other)

    def __pow__(self, n: int):
        out = TimePoly.one(self.vars, self.cap)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __eq__(self, other):
        if isinstance(other, TimePoly):
            self._check(other)
            return (self - other).is_zero()
        return (self - self._coerce(other)).is_zero()

    def partial(self, key) -> "TimePoly":
        idx = self.vars.index(key)
        terms = {}
        for exp, coeff in self.terms.items():
            e = exp[idx]
            if e == 0:
                continue
            dexp = exp[:idx] + (e - 1,) + exp[idx + 1 :]
            acc = terms.get(dexp, RAT_ZERO) + Rat(e) * coeff
            if not ris_zero(acc):
                terms[dexp] = acc
            else:
                terms.pop(dexp, None)
        out = TimePoly(self.vars, self.cap)
        out.terms = terms
        return out

    def shift(self, k: int) -> "TimePoly":
        if k == 0:
            return self
        out = TimePoly(self.vars, self.cap)
        out.terms = {e: rshift(c, k) for e, c in self.terms.items()}
        return out

    def derive(self) -> "TimePoly":
        out = TimePoly(self.vars, self.cap)
        for exp, coeff in self.terms.items():
            d = rderive(coeff)
            if not ris_zero(d):
                out.terms[exp] = d
        return out

    def truncate(self, d: int) -> "TimePoly":
        """Drop monomials of t-degree above d."""
        out = TimePoly(self.vars, self.cap)
        out.terms = {e: c for e, c in self.terms.items() if self.tdeg(e) <= d}
        return out

    def grade(self, d: int) -> "TimePoly":
        out = TimePoly(self.vars, self.cap)
        out.terms = {e: c for e, c in self.terms.items() if self.tdeg(e) == d}
        return out

    def max_tdeg(self) -> int:
        return max((self.tdeg(e) for e in self.terms), default=0)

    def map_coeffs(self, fn) -> "TimePoly":
        out = TimePoly(self.vars, self.cap)
        for exp, coeff in self.terms.items():
            v = fn(coeff)
            if not ris_zero(v):
                out.terms[exp] = v
        return out

    def inverse(self) -> "TimePoly":
        c0 = self.constant_term()
        if ris_zero(c0):
            raise NotInvertible("constant term is zero")
        r = rinverse(c0)
        nil = (self - c0) * r
        bound = self.cap + sum(1 for k in self.vars if not is_tvar(k))
        out = TimePoly.one(self.vars, self.cap)
        power = TimePoly.one(self.vars, self.cap)
        sign = RAT_ONE
        for _ in range(bound):
            power = power * nil
            if power.is_zero():
                break
            sign = -sign
            out = out + power * sign
        return out.map_coeffs(lambda c: c * r)

    def first_nonzero(self):
        """Deterministic witness: smallest exponent with nonzero coefficient."""
        if not self.terms:
            return None
        exp = min(self.terms)
        return exp, self.terms[exp]

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for exp in sorted(self.terms):
            factors = []
            for key, e in zip(self.vars, exp):
                if e == 0:
                    continue
                name = (
                    f"t[{key[1]},{key[2]}]" if is_tvar(key) else f"{key[1]}"
                )
                factors.append(name if e == 1 else f"{name}^{e}")
            head = "*".join(factors) or "1"
            parts.append(f"({self.terms[exp]})*{head}")
        return " + ".join(parts)
