"""Sampled coefficient functions: exact jets on a finite lattice.

A :class:`LatticeFn` stores, at each lattice site, the value of a function
of x together with its first ``depth`` x-derivatives, all exact rationals.
Sites are indexed in half-steps: site ``h`` is the point ``x = h*eps/2``.
Dressing and band data live on even sites; tau data lives on odd sites.
The ring operations mirror the symbolic ring: ``shift(k)`` moves by whole
lattice steps (2k half-steps), ``derive`` consumes one jet order, and
multiplication applies the Leibniz rule jetwise, so every identity that
holds for the symbolic ring can be checked here on concrete numbers.

Domains shrink conservatively: a binary operation keeps only sites where
both operands are defined, and shifting drops sites that fall outside the
stored range.  ``is_zero`` means "zero at every stored site"; callers that
need a non-vacuous witness must also look at ``domain_size``.
"""

from __future__ import annotations

from .errors import DeriveUnsupported, NotInvertible
from .rational import RAT_ONE, RAT_ZERO, Rat, binomial, is_rat

_BINOM_CACHE: dict[int, list] = {}


def _binom_row(n: int):
    row = _BINOM_CACHE.get(n)
    if row is None:
        row = [binomial(n, k) for k in range(n + 1)]
        _BINOM_CACHE[n] = row
    return row


def jet_add(a, b):
    return tuple(x + y for x, y in zip(a, b))


def jet_sub(a, b):
    return tuple(x - y for x, y in zip(a, b))


def jet_mul(a, b):
    out = []
    for j in range(min(len(a), len(b))):
        row = _binom_row(j)
        out.append(sum((row[i] * a[i] * b[j - i] for i in range(j + 1)), RAT_ZERO))
    return tuple(out)


def jet_inverse(jet):
    if jet[0] == 0:
        raise NotInvertible("zero leading jet value")
    inv0 = RAT_ONE / jet[0]
    inv = [inv0]
    for j in range(1, len(jet)):
        row = _binom_row(j)
        acc = sum((row[i] * jet[i] * inv[j - i] for i in range(1, j + 1)), RAT_ZERO)
        inv.append(-inv0 * acc)
    return tuple(inv)


class LatticeFn:
    __slots__ = ("vals", "depth")

    def __init__(self, vals: dict, depth: int):
        self.vals = vals
        self.depth = depth

    @classmethod
    def const(cls, value, sites, depth: int) -> "LatticeFn":
        value = Rat(value)
        jet = (value,) + (RAT_ZERO,) * depth
        return cls({h: jet for h in sites}, depth)

    @classmethod
    def from_jets(cls, jets: dict) -> "LatticeFn":
        depth = min(len(j) for j in jets.values()) - 1 if jets else 0
        vals = {h: tuple(jet[: depth + 1]) for h, jet in jets.items()}
        return cls(vals, depth)

    def domain(self):
        return set(self.vals)

    def domain_size(self) -> int:
        return len(self.vals)

    def is_zero(self) -> bool:
        return all(all(v == 0 for v in jet) for jet in self.vals.values())

    def value(self, h: int):
        return self.vals[h][0]

    def restrict(self, sites) -> "LatticeFn":
        return LatticeFn({h: self.vals[h] for h in sites if h in self.vals}, self.depth)

    def with_depth(self, depth: int) -> "LatticeFn":
        if depth > self.depth:
            raise DeriveUnsupported("cannot deepen a sampled jet")
        return LatticeFn({h: jet[: depth + 1] for h, jet in self.vals.items()}, depth)

    def _coerce(self, other):
        if isinstance(other, LatticeFn):
            return other
        if is_rat(other):
            return LatticeFn.const(other, self.vals.keys(), self.depth)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        depth = min(self.depth, other.depth)
        vals = {}
        for h in self.vals.keys() & other.vals.keys():
            a, b = self.vals[h], other.vals[h]
            vals[h] = tuple(a[i] + b[i] for i in range(depth + 1))
        return LatticeFn(vals, depth)

    __radd__ = __add__

    def __neg__(self):
        return LatticeFn(
            {h: tuple(-v for v in jet) for h, jet in self.vals.items()}, self.depth
        )

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
        depth = min(self.depth, other.depth)
        vals = {}
        for h in self.vals.keys() & other.vals.keys():
            a, b = self.vals[h], other.vals[h]
            jet = []
            for j in range(depth + 1):
                row = _binom_row(j)
                jet.append(sum((row[i] * a[i] * b[j - i] for i in range(j + 1)), RAT_ZERO))
            vals[h] = tuple(jet)
        return LatticeFn(vals, depth)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        out = LatticeFn.const(1, self.vals.keys(), self.depth)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __eq__(self, other):
        if not isinstance(other, LatticeFn):
            return NotImplemented
        return (self - other).is_zero()

    def shift(self, k: int) -> "LatticeFn":
        return self.shift_half(2 * k)

    def shift_half(self, j: int) -> "LatticeFn":
        if j == 0:
            return self
        vals = {}
        for h, jet in self.vals.items():
            vals[h - j] = jet
        return LatticeFn(vals, self.depth)

    def derive(self) -> "LatticeFn":
        if self.depth < 1:
            raise DeriveUnsupported("jet depth exhausted")
        return LatticeFn({h: jet[1:] for h, jet in self.vals.items()}, self.depth - 1)

    def inverse(self) -> "LatticeFn":
        vals = {}
        for h, jet in self.vals.items():
            if jet[0] == 0:
                raise NotInvertible(f"zero value at site {h}")
            inv0 = RAT_ONE / jet[0]
            inv = [inv0]
            for j in range(1, self.depth + 1):
                row = _binom_row(j)
                acc = sum((row[i] * jet[i] * inv[j - i] for i in range(1, j + 1)), RAT_ZERO)
                inv.append(-inv0 * acc)
            vals[h] = tuple(inv)
        return LatticeFn(vals, self.depth)

    def __repr__(self):
        if not self.vals:
            return "LatticeFn(<empty>)"
        items = ", ".join(
            f"{h}:{tuple(str(v) for v in jet)}" for h, jet in sorted(self.vals.items())
        )
        return f"LatticeFn({items})"
