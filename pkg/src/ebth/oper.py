"""Difference-operator algebra in the lattice shift.

A :class:`LambdaOp` is a finite window of a two-sided series
``sum_k a_k S^k`` in the shift symbol, stored coefficient-left, plus an
optional scalar multiple of ``eps * d/dx``.  Multiplication uses the
commutation rule "shift past a coefficient by relabelling it":
``S^k a = shift(a, k) S^k``.  The same support/exactness interval
annotations as for spectral series make truncated products sound: a
product coefficient is reported only when every contribution to it was
inside both factors' guaranteed windows.

The derivative part is deliberately minimal.  Only the two dressing
logarithms carry one, always with a constant rational coefficient, and
the only products they enter are commutators (where ``[eps*d, B]``
contributes ``eps * B'``) and scalar combinations.
"""

from __future__ import annotations

from .errors import (
    AmbiguousTail,
    DpartUnsupported,
    EmptyWindow,
    NotInvertible,
    WindowOverflow,
    WindowTooSmall,
)
from .rational import RAT_ONE, RAT_ZERO, Rat
from .ring import rderive, rinverse, ris_zero, rshift
from .series import LSeries, _add, _hi_min, _inside, _lo_max


class LambdaOp:
    __slots__ = ("eps", "exact", "supp", "coeffs", "dpart")

    def __init__(self, eps, exact, supp, coeffs=None, dpart=RAT_ZERO):
        self.eps = eps
        self.exact = tuple(exact)
        self.supp = tuple(supp)
        self.dpart = dpart
        self.coeffs = {}
        if coeffs:
            for k, c in coeffs.items():
                if ris_zero(c) or not self._fits(k):
                    continue
                self.coeffs[k] = c

    def _fits(self, k: int) -> bool:
        return _inside(k, *self.exact) and _inside(k, *self.supp)

    @classmethod
    def constant(cls, eps, value) -> "LambdaOp":
        return cls(eps, (None, None), (0, 0), {0: value})

    @classmethod
    def identity(cls, eps) -> "LambdaOp":
        return cls.constant(eps, RAT_ONE)

    @classmethod
    def zero(cls, eps) -> "LambdaOp":
        return cls(eps, (None, None), (0, 0))

    @classmethod
    def shift_power(cls, eps, k: int, coeff=RAT_ONE) -> "LambdaOp":
        return cls(eps, (None, None), (k, k), {k: coeff})

    @classmethod
    def dx(cls, eps, coeff=RAT_ONE) -> "LambdaOp":
        """The operator coeff * (eps * d/dx)."""
        return cls(eps, (None, None), (0, 0), {}, dpart=coeff)

    def coeff(self, k: int, default=RAT_ZERO):
        if not self._fits(k):
            raise WindowOverflow(f"shift power {k} outside guaranteed window")
        return self.coeffs.get(k, default)

    def unknown_low(self) -> bool:
        lo, _ = self.exact
        if lo is None:
            return False
        slo = self.supp[0]
        return slo is None or slo < lo

    def unknown_high(self) -> bool:
        _, hi = self.exact
        if hi is None:
            return False
        shi = self.supp[1]
        return shi is None or shi > hi

    def is_zero(self) -> bool:
        return not self.coeffs and ris_zero(self.dpart)

    def has_window(self, lo: int, hi: int) -> bool:
        elo, ehi = self.exact
        return (elo is None or elo <= lo) and (ehi is None or ehi >= hi)

    def assert_window(self, lo: int, hi: int):
        if not self.has_window(lo, hi):
            raise WindowTooSmall(
                f"operator window {self.exact} does not cover [{lo},{hi}]"
            )

    def clip(self, lo, hi) -> "LambdaOp":
        exact = (_lo_max(self.exact[0], lo), _hi_min(self.exact[1], hi))
        out = LambdaOp(self.eps, exact, self.supp, dpart=self.dpart)
        out.coeffs = {k: c for k, c in self.coeffs.items() if _inside(k, *exact)}
        return out

    def map_coeffs(self, fn, map_dpart=None) -> "LambdaOp":
        out = LambdaOp(self.eps, self.exact, self.supp)
        for k, c in self.coeffs.items():
            v = fn(c)
            if not ris_zero(v):
                out.coeffs[k] = v
        out.dpart = self.dpart if map_dpart is None else map_dpart(self.dpart)
        return out

    def shift_x(self, k: int) -> "LambdaOp":
        """Relabel every coefficient by S^k (shift the whole operator in x)."""
        return self.map_coeffs(lambda c: rshift(c, k))

    def __add__(self, other):
        if not isinstance(other, LambdaOp):
            other = LambdaOp.constant(self.eps, other)
        exact = (
            _lo_max(self.exact[0], other.exact[0]),
            _hi_min(self.exact[1], other.exact[1]),
        )
        supp = (
            None
            if self.supp[0] is None or other.supp[0] is None
            else min(self.supp[0], other.supp[0]),
            None
            if self.supp[1] is None or other.supp[1] is None
            else max(self.supp[1], other.supp[1]),
        )
        out = LambdaOp(self.eps, exact, supp, dpart=self.dpart + other.dpart)
        coeffs = dict(self.coeffs)
        for k, c in other.coeffs.items():
            acc = coeffs.get(k, RAT_ZERO) + c
            if ris_zero(acc):
                coeffs.pop(k, None)
            else:
                coeffs[k] = acc
        out.coeffs = {k: c for k, c in coeffs.items() if out._fits(k)}
        return out

    __radd__ = __add__

    def __neg__(self):
        out = LambdaOp(self.eps, self.exact, self.supp, dpart=-self.dpart)
        out.coeffs = {k: -c for k, c in self.coeffs.items()}
        return out

    def __sub__(self, other):
        if not isinstance(other, LambdaOp):
            other = LambdaOp.constant(self.eps, other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, factor) -> "LambdaOp":
        out = LambdaOp(self.eps, self.exact, self.supp, dpart=self.dpart * factor)
        for k, c in self.coeffs.items():
            v = c * factor
            if not ris_zero(v):
                out.coeffs[k] = v
        return out

    def _is_scalar(self) -> bool:
        return set(self.coeffs) <= {0} and self.supp == (0, 0)

    def __mul__(self, other):
        if not isinstance(other, LambdaOp):
            return self.scale(other)
        a_d, b_d = self.dpart, other.dpart
        if not ris_zero(a_d) and not ris_zero(b_d):
            raise DpartUnsupported("product of two derivative-bearing operators")
        if not ris_zero(a_d) and not other._is_scalar():
            raise DpartUnsupported("derivative part cannot pass a non-scalar factor")
        if not ris_zero(b_d) and not self._is_scalar():
            raise DpartUnsupported("derivative part cannot follow a non-scalar factor")
        (sa_lo, sa_hi), (sb_lo, sb_hi) = self.supp, other.supp
        (ea_lo, ea_hi), (eb_lo, eb_hi) = self.exact, other.exact
        lows, highs = [], []
        empty = False
        if self.unknown_low():
            if sb_hi is None:
                empty = True
            else:
                lows.append(ea_lo + sb_hi)
        if other.unknown_low():
            if sa_hi is None:
                empty = True
            else:
                lows.append(eb_lo + sa_hi)
        if self.unknown_high():
            if sb_lo is None:
                empty = True
            else:
                highs.append(ea_hi + sb_lo)
        if other.unknown_high():
            if sa_lo is None:
                empty = True
            else:
                highs.append(eb_hi + sa_lo)
        lo = _lo_max(*lows) if lows else None
        hi = _hi_min(*highs) if highs else None
        if empty or (lo is not None and hi is not None and lo > hi):
            raise EmptyWindow("no exact coefficients remain in the product")
        supp = (_add(sa_lo, sb_lo), _add(sa_hi, sb_hi))
        out = LambdaOp(self.eps, (lo, hi), supp)
        coeffs = {}
        for i, a in self.coeffs.items():
            for j, b in other.coeffs.items():
                k = i + j
                if not out._fits(k):
                    continue
                v = a * rshift(b, i)
                acc = coeffs.get(k, RAT_ZERO) + v
                if ris_zero(acc):
                    coeffs.pop(k, None)
                else:
                    coeffs[k] = acc
        # eps*d acting from the left differentiates the other factor; the
        # surviving dpart must stay a plain rational.
        from .rational import is_rat

        if not ris_zero(a_d):
            c0 = other.coeffs.get(0, RAT_ZERO)
            if not is_rat(c0):
                raise DpartUnsupported("derivative part would become operator-valued")
            for j, b in other.coeffs.items():
                db = rderive(b)
                if ris_zero(db):
                    continue
                v = a_d * self.eps * db
                acc = coeffs.get(j, RAT_ZERO) + v
                coeffs[j] = acc
                if ris_zero(acc):
                    coeffs.pop(j, None)
            out.dpart = a_d * c0
        if not ris_zero(b_d):
            c0 = self.coeffs.get(0, RAT_ZERO)
            if not is_rat(c0):
                raise DpartUnsupported("derivative part would become operator-valued")
            out.dpart = b_d * c0
        out.coeffs = coeffs
        return out

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise NotInvertible("negative operator powers are not defined here")
        out = LambdaOp.identity(self.eps)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __eq__(self, other):
        if not isinstance(other, LambdaOp):
            other = LambdaOp.constant(self.eps, other)
        return (self - other).is_zero()

    def right_coeffs(self) -> dict:
        """Coefficients in the shift-left arrangement sum_k S^k b_k."""
        return {k: rshift(c, -k) for k, c in self.coeffs.items()}

    def __repr__(self):
        if self.is_zero():
            return "0"
        parts = []
        if not ris_zero(self.dpart):
            parts.append(f"({self.dpart})*eps*d")
        for k in sorted(self.coeffs):
            parts.append(f"S^{k}:({self.coeffs[k]!r})")
        return " + ".join(parts)


def project(op: LambdaOp, sign: str) -> LambdaOp:
    """Nonnegative / negative shift-power part (dpart goes to "plus")."""
    elo, ehi = op.exact
    slo, shi = op.supp
    if sign == "plus":
        if elo is not None and elo > 0 and (slo is None or slo < elo):
            raise AmbiguousTail("unknown coefficients cross the projection edge")
        exact = (None, ehi)
        supp = (max(slo, 0) if slo is not None else 0, shi)
        out = LambdaOp(op.eps, exact, supp, dpart=op.dpart)
        out.coeffs = {k: c for k, c in op.coeffs.items() if k >= 0 and out._fits(k)}
        return out
    if sign == "minus":
        if ehi is not None and ehi < -1 and (shi is None or shi > ehi):
            raise AmbiguousTail("unknown coefficients cross the projection edge")
        exact = (elo, None)
        supp = (slo, min(shi, -1) if shi is not None else -1)
        out = LambdaOp(op.eps, exact, supp)
        out.coeffs = {k: c for k, c in op.coeffs.items() if k < 0 and out._fits(k)}
        return out
    raise ValueError(f"unknown projection sign {sign!r}")


def commutator(a: LambdaOp, b: LambdaOp) -> LambdaOp:
    """[a, b] with derivative parts folded in exactly.

    The scalar eps*d parts contribute eps times the x-derivative of the
    other factor's coefficients; the dpart of the result is always zero.
    """
    a_plain = LambdaOp(a.eps, a.exact, a.supp, dict(a.coeffs))
    b_plain = LambdaOp(b.eps, b.exact, b.supp, dict(b.coeffs))
    out = a_plain * b_plain - b_plain * a_plain
    if not ris_zero(a.dpart):
        out = out + b_plain.map_coeffs(lambda c: a.dpart * a.eps * rderive(c))
    if not ris_zero(b.dpart):
        out = out - a_plain.map_coeffs(lambda c: b.dpart * b.eps * rderive(c))
    return out


def sharp(op: LambdaOp) -> LambdaOp:
    """Antiinvolution: fixes coefficients as functions, inverts the shift."""
    if not ris_zero(op.dpart):
        raise DpartUnsupported("antiinvolution is defined on shift series only")
    elo, ehi = op.exact
    slo, shi = op.supp
    neg = lambda v: None if v is None else -v
    out = LambdaOp(op.eps, (neg(ehi), neg(elo)), (neg(shi), neg(slo)))
    out.coeffs = {-k: rshift(c, -k) for k, c in op.coeffs.items()}
    return out


def invert(op: LambdaOp, kind: str, depth=None) -> LambdaOp:
    """Two-sided inverse of a triangular operator.

    ``monicLower``: support in k <= 0 with unit top coefficient.
    ``unitUpper``: support in k >= 0 with invertible bottom coefficient.
    The result is exact to ``depth`` (default: the input's exact depth).
    """
    if not ris_zero(op.dpart):
        raise DpartUnsupported("cannot invert a derivative-bearing operator")
    elo, ehi = op.exact
    slo, shi = op.supp
    if kind == "monicLower":
        if shi is None or shi > 0:
            raise NotInvertible("support must lie in nonpositive shift powers")
        avail = None
        if elo is not None:
            avail = -elo
        elif slo is not None:
            avail = -slo
        depth = avail if depth is None else (depth if avail is None else min(depth, avail))
        if depth is None:
            raise NotInvertible("no usable window")
        top = op.coeffs.get(0)
        if top is None or not ris_zero(top - RAT_ONE):
            raise NotInvertible("top coefficient must be one")
        xs = {0: RAT_ONE}
        for m in range(1, depth + 1):
            acc = RAT_ZERO
            for i in range(-m, 0):
                a = op.coeffs.get(i)
                if a is None:
                    continue
                x = xs.get(-m - i)
                if x is None or ris_zero(x):
                    continue
                acc = acc + a * rshift(x, i)
            xs[-m] = -acc
        out = LambdaOp(op.eps, (-depth, None), (None, 0))
        out.coeffs = {k: c for k, c in xs.items() if not ris_zero(c)}
        return out
    if kind == "unitUpper":
        if slo is None or slo < 0:
            raise NotInvertible("support must lie in nonnegative shift powers")
        avail = None
        if ehi is not None:
            avail = ehi
        elif shi is not None:
            avail = shi
        depth = avail if depth is None else (depth if avail is None else min(depth, avail))
        if depth is None:
            raise NotInvertible("no usable window")
        bottom = op.coeffs.get(0)
        if bottom is None or ris_zero(bottom):
            raise NotInvertible("bottom coefficient must be invertible")
        binv = rinverse(bottom)
        xs = {0: binv}
        for m in range(1, depth + 1):
            acc = RAT_ZERO
            for i in range(1, m + 1):
                a = op.coeffs.get(i)
                if a is None:
                    continue
                x = xs.get(m - i)
                if x is None or ris_zero(x):
                    continue
                acc = acc + a * rshift(x, i)
            xs[m] = -(binv * acc)
        out = LambdaOp(op.eps, (None, depth), (0, None))
        out.coeffs = {k: c for k, c in xs.items() if not ris_zero(c)}
        return out
    raise ValueError(f"unknown inversion kind {kind!r}")


def left_symbol(op: LambdaOp, nv: int = 1, slot: int = 0) -> LSeries:
    """Spectral symbol of a coefficient-left operator (a_k -> a_k z^k)."""
    if not ris_zero(op.dpart):
        raise DpartUnsupported("symbols are defined on shift series only")
    exacts = [(None, None)] * nv
    supps = [(0, 0)] * nv
    exacts[slot] = op.exact
    supps[slot] = op.supp
    out = LSeries(nv, exacts, supps)
    for k, c in op.coeffs.items():
        e = [0] * nv
        e[slot] = k
        out.terms[tuple(e)] = c
    return out


def right_symbol(op: LambdaOp, nv: int = 1, slot: int = 0) -> LSeries:
    """Spectral symbol of the shift-left arrangement (b_k -> b_k z^k)."""
    if not ris_zero(op.dpart):
        raise DpartUnsupported("symbols are defined on shift series only")
    exacts = [(None, None)] * nv
    supps = [(0, 0)] * nv
    exacts[slot] = op.exact
    supps[slot] = op.supp
    out = LSeries(nv, exacts, supps)
    for k, c in op.right_coeffs().items():
        e = [0] * nv
        e[slot] = k
        out.terms[tuple(e)] = c
    return out


def residue_op(op: LambdaOp, default=RAT_ZERO):
    """Coefficient of the first negative shift power."""
    return op.coeff(-1, default)
