"""Truncated Laurent series in one or more spectral variables.

An :class:`LSeries` stores sparse coefficients keyed by integer exponent
tuples.  Two interval annotations per variable make truncation sound:

* ``supp`` bounds the true mathematical support (None = unbounded),
* ``exact`` is the interval on which stored coefficients are guaranteed
  to equal the true ones (None = guaranteed arbitrarily far; everything
  stored is inside it, coefficients inside it but absent are exact zeros).

Products propagate both annotations conservatively, so a coefficient is
never reported unless every contribution to it was stored.  Variable 0 is
the residue variable; ``residue`` reads its exponent -1 layer.

The optional ``ell`` layer holds the coefficient of the formal generator
that multiplies the series logarithmically (degree capped at one; a
product whose quadratic layer fails to vanish raises).
"""

from __future__ import annotations

from .errors import (
    NotInvertible,
    TruncationUnsupported,
    WindowExhausted,
    WindowOverflow,
)
from .rational import RAT_ONE, RAT_ZERO, Rat, binomial
from .ring import ris_zero


def _lo_max(*vals):
    best = None
    for v in vals:
        if v is None:
            continue
        best = v if best is None else max(best, v)
    return best


def _hi_min(*vals):
    best = None
    for v in vals:
        if v is None:
            continue
        best = v if best is None else min(best, v)
    return best


def _add(a, b):
    return None if a is None or b is None else a + b


def _inside(e: int, lo, hi) -> bool:
    return (lo is None or e >= lo) and (hi is None or e <= hi)


class LSeries:
    __slots__ = ("nv", "exact", "supp", "terms", "ell")

    def __init__(self, nv, exact, supp, terms=None, ell=None):
        self.nv = nv
        self.exact = tuple(exact)
        self.supp = tuple(supp)
        self.terms = {}
        self.ell = {}
        if terms:
            for exp, coeff in terms.items():
                if ris_zero(coeff) or not self._fits(exp):
                    continue
                self.terms[exp] = coeff
        if ell:
            for exp, coeff in ell.items():
                if ris_zero(coeff) or not self._fits(exp):
                    continue
                self.ell[exp] = coeff

    def _fits(self, exp) -> bool:
        return all(
            _inside(e, lo, hi) and _inside(e, slo, shi)
            for e, (lo, hi), (slo, shi) in zip(exp, self.exact, self.supp)
        )

    @classmethod
    def constant(cls, nv: int, value) -> "LSeries":
        zero = (0,) * nv
        return cls(nv, ((None, None),) * nv, ((0, 0),) * nv, {zero: value})

    @classmethod
    def zero(cls, nv: int) -> "LSeries":
        return cls(nv, ((None, None),) * nv, ((0, 0),) * nv)

    @classmethod
    def monomial(cls, nv: int, exp, coeff) -> "LSeries":
        exp = tuple(exp)
        supp = tuple((e, e) for e in exp)
        return cls(nv, ((None, None),) * nv, supp, {exp: coeff})

    def unknown_low(self, i: int) -> bool:
        (lo, _), (slo, _) = self.exact[i], self.supp[i]
        if lo is None:
            return False
        return slo is None or slo < lo

    def unknown_high(self, i: int) -> bool:
        (_, hi), (_, shi) = self.exact[i], self.supp[i]
        if hi is None:
            return False
        return shi is None or shi > hi

    def is_zero(self) -> bool:
        return not self.terms and not self.ell

    def coeff(self, exp, default=RAT_ZERO):
        exp = tuple(exp)
        if not self._fits(exp):
            raise WindowOverflow(f"coefficient {exp} outside guaranteed window")
        return self.terms.get(exp, default)

    def has_window(self, i: int, lo: int, hi: int) -> bool:
        elo, ehi = self.exact[i]
        return (elo is None or elo <= lo) and (ehi is None or ehi >= hi)

    def assert_window(self, i: int, lo: int, hi: int):
        if not self.has_window(i, lo, hi):
            raise WindowOverflow(
                f"variable {i} window {self.exact[i]} does not cover [{lo},{hi}]"
            )

    def clip(self, i: int, lo, hi) -> "LSeries":
        exact = list(self.exact)
        exact[i] = (_lo_max(exact[i][0], lo), _hi_min(exact[i][1], hi))
        out = LSeries(self.nv, exact, self.supp)
        out.terms = {e: c for e, c in self.terms.items() if _inside(e[i], *exact[i])}
        out.ell = {e: c for e, c in self.ell.items() if _inside(e[i], *exact[i])}
        return out

    def __add__(self, other):
        if not isinstance(other, LSeries):
            return self + LSeries.constant(self.nv, other)
        exact = tuple(
            (_lo_max(a[0], b[0]), _hi_min(a[1], b[1]))
            for a, b in zip(self.exact, other.exact)
        )
        supp = tuple(
            (None if a[0] is None or b[0] is None else min(a[0], b[0]),
             None if a[1] is None or b[1] is None else max(a[1], b[1]))
            for a, b in zip(self.supp, other.supp)
        )
        out = LSeries(self.nv, exact, supp)
        terms = dict(self.terms)
        for exp, coeff in other.terms.items():
            acc = terms.get(exp, RAT_ZERO) + coeff
            if ris_zero(acc):
                terms.pop(exp, None)
            else:
                terms[exp] = acc
        ell = dict(self.ell)
        for exp, coeff in other.ell.items():
            acc = ell.get(exp, RAT_ZERO) + coeff
            if ris_zero(acc):
                ell.pop(exp, None)
            else:
                ell[exp] = acc
        out.terms = {e: c for e, c in terms.items() if out._fits(e)}
        out.ell = {e: c for e, c in ell.items() if out._fits(e)}
        return out

    __radd__ = __add__

    def __neg__(self):
        out = LSeries(self.nv, self.exact, self.supp)
        out.terms = {e: -c for e, c in self.terms.items()}
        out.ell = {e: -c for e, c in self.ell.items()}
        return out

    def __sub__(self, other):
        if not isinstance(other, LSeries):
            other = LSeries.constant(self.nv, other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, factor) -> "LSeries":
        out = LSeries(self.nv, self.exact, self.supp)
        for e, c in self.terms.items():
            v = c * factor
            if not ris_zero(v):
                out.terms[e] = v
        for e, c in self.ell.items():
            v = c * factor
            if not ris_zero(v):
                out.ell[e] = v
        return out

    def __mul__(self, other):
        if not isinstance(other, LSeries):
            return self.scale(other)
        exact = []
        for i in range(self.nv):
            (sa_lo, sa_hi) = self.supp[i]
            (sb_lo, sb_hi) = other.supp[i]
            (ea_lo, ea_hi) = self.exact[i]
            (eb_lo, eb_hi) = other.exact[i]
            lows, highs = [], []
            empty = False
            if self.unknown_low(i):
                if sb_hi is None:
                    empty = True
                else:
                    lows.append(ea_lo + sb_hi)
            if other.unknown_low(i):
                if sa_hi is None:
                    empty = True
                else:
                    lows.append(eb_lo + sa_hi)
            if self.unknown_high(i):
                if sb_lo is None:
                    empty = True
                else:
                    highs.append(ea_hi + sb_lo)
            if other.unknown_high(i):
                if sa_lo is None:
                    empty = True
                else:
                    highs.append(eb_hi + sa_lo)
            lo = _lo_max(*lows) if lows else None
            hi = _hi_min(*highs) if highs else None
            if empty or (lo is not None and hi is not None and lo > hi):
                lo, hi = 1, 0
            exact.append((lo, hi))
        supp = tuple(
            (_add(a[0], b[0]), _add(a[1], b[1]))
            for a, b in zip(self.supp, other.supp)
        )
        out = LSeries(self.nv, exact, supp)
        terms = {}

        def _acc(dst, exp, val):
            acc = dst.get(exp, RAT_ZERO) + val
            if ris_zero(acc):
                dst.pop(exp, None)
            else:
                dst[exp] = acc

        for ea, ca in self.terms.items():
            for eb, cb in other.terms.items():
                exp = tuple(x + y for x, y in zip(ea, eb))
                if out._fits(exp):
                    _acc(terms, exp, ca * cb)
        ell = {}
        for src_ell, src_plain in ((self.ell, other.terms), (other.ell, self.terms)):
            for ea, ca in src_ell.items():
                for eb, cb in src_plain.items():
                    exp = tuple(x + y for x, y in zip(ea, eb))
                    if out._fits(exp):
                        _acc(ell, exp, ca * cb)
        for ea, ca in self.ell.items():
            for eb, cb in other.ell.items():
                if not ris_zero(ca * cb):
                    raise TruncationUnsupported("quadratic log-layer did not vanish")
        out.terms = terms
        out.ell = ell
        return out

    __rmul__ = __mul__

    def mul_monomial(self, exp, coeff=RAT_ONE) -> "LSeries":
        exp = tuple(exp)
        exact = tuple(
            (_add(lo, k), _add(hi, k)) for (lo, hi), k in zip(self.exact, exp)
        )
        supp = tuple(
            (_add(lo, k), _add(hi, k)) for (lo, hi), k in zip(self.supp, exp)
        )
        out = LSeries(self.nv, exact, supp)
        out.terms = {
            tuple(x + k for x, k in zip(e, exp)): c * coeff
            for e, c in self.terms.items()
        }
        out.ell = {
            tuple(x + k for x, k in zip(e, exp)): c * coeff
            for e, c in self.ell.items()
        }
        return out

    def residue(self, default=RAT_ZERO):
        """Coefficient layer at exponent -1 of variable 0."""
        lo, hi = self.exact[0]
        if (lo is not None and lo > -1) or (hi is not None and hi < -1):
            raise WindowOverflow("window does not cover the residue exponent")
        if self.ell:
            raise TruncationUnsupported("residue of a series with log layer")
        if self.nv == 1:
            return self.terms.get((-1,), default)
        out = LSeries(
            self.nv - 1,
            self.exact[1:],
            tuple((None, None) for _ in range(self.nv - 1)),
        )
        for exp, coeff in self.terms.items():
            if exp[0] == -1:
                out.terms[exp[1:]] = coeff
        return out

    def partial_var0(self) -> "LSeries":
        """Formal derivative with respect to variable 0."""
        exact = ((_add(self.exact[0][0], -1), _add(self.exact[0][1], -1)),) + self.exact[1:]
        supp = ((_add(self.supp[0][0], -1), _add(self.supp[0][1], -1)),) + self.supp[1:]
        out = LSeries(self.nv, exact, supp)
        for exp, coeff in self.terms.items():
            k = exp[0]
            if k == 0:
                continue
            v = coeff * Rat(k)
            if not ris_zero(v):
                out.terms[(k - 1,) + exp[1:]] = v
        return out

    def map_coeffs(self, fn) -> "LSeries":
        out = LSeries(self.nv, self.exact, self.supp)
        for e, c in self.terms.items():
            v = fn(c)
            if not ris_zero(v):
                out.terms[e] = v
        for e, c in self.ell.items():
            v = fn(c)
            if not ris_zero(v):
                out.ell[e] = v
        return out

    def embed(self, nv: int, slot: int) -> "LSeries":
        """View a 1-variable series inside an nv-variable algebra."""
        assert self.nv == 1 and not self.ell
        exact = [(None, None)] * nv
        supp = [(0, 0)] * nv
        exact[slot] = self.exact[0]
        supp[slot] = self.supp[0]
        out = LSeries(nv, exact, supp)
        for (k,), c in self.terms.items():
            exp = [0] * nv
            exp[slot] = k
            out.terms[tuple(exp)] = c
        return out

    def ell_layer(self) -> "LSeries":
        out = LSeries(self.nv, self.exact, (self.supp if self.ell else self.supp))
        out.terms = dict(self.ell)
        return out

    def plain_layer(self) -> "LSeries":
        out = LSeries(self.nv, self.exact, self.supp)
        out.terms = dict(self.terms)
        return out

    def reciprocal(self, depth=None) -> "LSeries":
        """Inverse of a one-variable series with a unit edge coefficient.

        Supported shapes: support bounded above by 0 with invertible top
        coefficient, or bounded below by 0 with invertible bottom
        coefficient (the two dressing-symbol orientations).  ``depth``
        bounds how far from 0 the inverse is computed; it defaults to the
        guaranteed window of the input and is capped by it.
        """
        if self.nv != 1 or self.ell:
            raise NotInvertible("reciprocal needs a plain one-variable series")
        slo, shi = self.supp[0]
        elo, ehi = self.exact[0]
        if shi is not None and shi == 0:
            avail = None
            if elo is not None:
                avail = -elo
            elif slo is not None:
                avail = -slo
            if depth is None:
                depth = avail
            elif avail is not None:
                depth = min(depth, avail)
            if depth is None:
                raise NotInvertible("no usable window for the inverse")
            unit = self.terms.get((0,))
            if unit is None or ris_zero(unit):
                raise NotInvertible("top coefficient is zero")
            from .ring import rinverse

            inv_unit = rinverse(unit)
            tail = LSeries(1, ((-depth, None),), ((None, -1),))
            for (k,), c in self.terms.items():
                if -depth <= k <= -1:
                    tail.terms[(k,)] = c * inv_unit
            out = LSeries.constant(1, RAT_ONE)
            power = LSeries.constant(1, RAT_ONE)
            sign = RAT_ONE
            for _ in range(depth):
                power = (power * tail).clip(0, -depth, 0)
                if power.is_zero():
                    break
                sign = -sign
                out = out + power.scale(sign)
            out = out.scale(inv_unit)
            return LSeries(1, ((-depth, None),), ((None, 0),), out.terms)
        if slo is not None and slo == 0:
            rev = LSeries(
                1,
                ((None if ehi is None else -ehi, None if elo is None else -elo),),
                ((None if shi is None else -shi, 0),),
            )
            rev.terms = {(-k,): c for (k,), c in self.terms.items()}
            inv = rev.reciprocal(depth=depth)
            got = -inv.exact[0][0]
            out = LSeries(1, ((None, got),), ((0, None),))
            out.terms = {(-k,): c for (k,), c in inv.terms.items()}
            return out
        raise NotInvertible("series is not edge-unit")

    def __repr__(self):
        if self.is_zero():
            return "0"
        parts = []
        for exp in sorted(self.terms):
            parts.append(f"L^{exp}:({self.terms[exp]!r})")
        for exp in sorted(self.ell):
            parts.append(f"l*L^{exp}:({self.ell[exp]!r})")
        return " + ".join(parts)


class TimeShiftSequence:
    """One of the two spectral substitution sequences for the times.

    Kind "N" attaches to each time ``t[alpha, n]`` with ``1 <= alpha <= N``
    a single monomial ``c * z^e`` with strictly negative exponent
    ``e = -(N*(n+1) - alpha + 1)``; every other entry is zero.  Kind "M"
    attaches to ``t[beta, n]`` with ``-M+1 <= beta <= 0`` the exponent
    ``e = M*(n+1) + beta`` (strictly positive); other entries vanish,
    in particular the extended times carry no entry in either kind.
    The rational prefactors follow from the functional equation of the
    Gamma function, so everything stays exact.
    """

    def __init__(self, kind: str, sign: int, N: int, M: int, eps):
        assert kind in ("N", "M") and sign in (1, -1)
        self.kind = kind
        self.sign = sign
        self.N = N
        self.M = M
        self.eps = eps

    def entry(self, alpha: int, n: int):
        """(exponent, coefficient) for t[alpha, n], or None."""
        if self.kind == "N":
            if not (1 <= alpha <= self.N):
                return None
            N = self.N
            exp = -(N * (n + 1) - alpha + 1)
            s = Rat(alpha - 1, N)
            coeff = self.eps / (Rat(N) * (1 - s))
            for j in range(1, n + 1):
                coeff = coeff * (j - s)
        else:
            if not (-self.M + 1 <= alpha <= 0):
                return None
            M = self.M
            exp = M * (n + 1) + alpha
            s = Rat(alpha, M)
            coeff = self.eps / (Rat(M) * (1 + s))
            for j in range(1, n + 1):
                coeff = coeff * (j + s)
        return exp, coeff * Rat(self.sign)

    def alphas(self):
        if self.kind == "N":
            return range(1, self.N + 1)
        return range(-self.M + 1, 1)

    def entries_up_to(self, bound: int):
        """All entries with |exponent| <= bound, keyed by time variable."""
        out = {}
        for alpha in self.alphas():
            n = 0
            while True:
                exp, coeff = self.entry(alpha, n)
                if abs(exp) > bound:
                    break
                out[("t", alpha, n)] = (exp, coeff)
                n += 1
        return out

    def var_with_magnitude(self, b: int):
        """The unique time whose entry exponent has |e| = b (b >= 1)."""
        if self.kind == "N":
            for alpha in range(1, self.N + 1):
                if (b - 1 + alpha) % self.N == 0:
                    n = (b - 1 + alpha) // self.N - 1
                    if n >= 0:
                        return ("t", alpha, n)
        else:
            for beta in range(-self.M + 1, 1):
                if (b - beta) % self.M == 0:
                    n = (b - beta) // self.M - 1
                    if n >= 0:
                        return ("t", beta, n)
        return None

    def exact_order(self, active_vars) -> int:
        """Largest |exponent| below the first entry on an inactive time.

        Substituting into a polynomial that only carries the active
        times is exact for spectral orders up to this bound; beyond it
        the dropped times would have contributed.
        """
        for b in range(1, 10_000):
            var = self.var_with_magnitude(b)
            if var is not None and var not in active_vars:
                return b - 1
        raise WindowExhausted("runaway exact-order scan")


def time_shift_series(poly, seq: TimeShiftSequence, order: int, nv: int = 1, slot: int = 0):
    """Expand ``poly`` with every time replaced by time + sequence entry.

    Returns an :class:`LSeries` over the same time-polynomial ring, exact
    through spectral orders ``|e| <= order`` in variable ``slot`` (capped
    by the first sequence entry whose time is absent from ``poly``).
    """
    active = set(poly.vars)
    order = min(order, seq.exact_order(active))
    entries = {
        var: ec for var, ec in seq.entries_up_to(order).items() if var in active
    }
    accum: dict[int, dict] = {}
    zero_poly = poly.like({})
    for exp, coeff in poly.terms.items():
        # expand prod_i (t_i + c_i z^{e_i})^{exp_i}
        parts = [(0, exp, coeff)]
        for idx, key in enumerate(poly.vars):
            if key not in entries or exp[idx] == 0:
                continue
            e_lam, c_lam = entries[key]
            new_parts = []
            for lam, cur_exp, cur_coeff in parts:
                e_i = cur_exp[idx]
                c_pow = RAT_ONE
                for j in range(e_i + 1):
                    drop = tuple(
                        v - j if i == idx else v for i, v in enumerate(cur_exp)
                    )
                    lam_j = lam + j * e_lam
                    if abs(lam_j) > order and (
                        (seq.kind == "N" and lam_j < 0) or (seq.kind == "M" and lam_j > 0)
                    ):
                        c_pow = c_pow * c_lam
                        continue
                    new_parts.append(
                        (lam_j, drop, cur_coeff * binomial(e_i, j) * c_pow)
                    )
                    c_pow = c_pow * c_lam
            parts = new_parts
        for lam, mono_exp, c in parts:
            if abs(lam) > order:
                continue
            layer = accum.setdefault(lam, {})
            layer[mono_exp] = layer.get(mono_exp, RAT_ZERO) + c
    if seq.kind == "N":
        exact = (-order, None)
        supp = (None, 0)
    else:
        exact = (None, order)
        supp = (0, None)
    exacts = [(None, None)] * nv
    supps = [(0, 0)] * nv
    exacts[slot] = exact
    supps[slot] = supp
    out = LSeries(nv, exacts, supps)
    for lam, layer in accum.items():
        coeff_poly = poly.like(layer)
        if not coeff_poly.is_zero():
            e = [0] * nv
            e[slot] = lam
            out.terms[tuple(e)] = coeff_poly
    return out


def series_exp(x: LSeries, windows, hard_cap: int = 400) -> LSeries:
    """Exponential of a series that is nilpotent within clip ``windows``.

    ``windows`` is a sequence of (lo, hi) pairs, one per variable; every
    power of ``x`` is clipped to them, so the sum terminates as soon as
    the powers leave the window (one-sided spectral content) or vanish
    (nilpotent time content).
    """

    def _clipped(s: LSeries) -> LSeries:
        for i, (lo, hi) in enumerate(windows):
            s = s.clip(i, lo, hi)
        return s

    x = _clipped(x)
    acc = LSeries.constant(x.nv, RAT_ONE)
    total = _clipped(acc + x.scale(RAT_ZERO))
    fact = RAT_ONE
    for j in range(1, hard_cap + 1):
        acc = _clipped(acc * x)
        if acc.is_zero():
            return total
        fact = fact * Rat(j)
        total = total + acc.scale(RAT_ONE / fact)
    raise WindowExhausted("exponential did not terminate within the window")
