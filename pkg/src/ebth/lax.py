"""Hierarchy state: dressing pairs, band operator, roots, logarithms, flows.

The fundamental state is a pair of triangular dressing operators.  The
associated band operator has shift powers between -M and N; conjugating
the elementary shifts through the pair yields its two fractional roots,
and conjugating eps*d/dx yields the two logarithms whose average is the
derivative-free generator of the extended flows.

Sampled states are built the other way around: draw random exact jets for
the band coefficients (the lowest one nonzero) together with boundary
seeds for both dressing series, then solve the triangular lattice
recursions that make both conjugations reproduce the band operator
exactly on the guaranteed window.  Every identity in the package is then
checked on these concrete states with zero-residual arithmetic.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import NamedTuple

from .errors import (
    ConfigError,
    DeriveUnsupported,
    UnluckyZero,
    WindowTooSmall,
)
from .lattice import LatticeFn, jet_add, jet_mul, jet_sub
from .oper import LambdaOp, commutator, invert, project
from .rational import RAT_ONE, RAT_ZERO, Rat, is_rat, rat_str
from .ring import CoeffPoly, Gen, rderive, ris_zero, rshift


class FlowIndex(NamedTuple):
    alpha: int
    n: int


@dataclass(frozen=True)
class Params:
    """Session-wide shape parameters, fixed before any computation."""

    N: int = 1
    M: int = 1
    eps: object = RAT_ONE
    depth: int = 8           # dressing series stored to shift power -depth / +depth
    der: int = 2             # jet depth carried by sampled coefficients
    lattice_radius: int = 8  # even sites in [-2*radius, 2*radius]
    D: int = 2               # total degree cap in the times
    lam_order: int = 8       # spectral window bound for symbol work

    def __post_init__(self):
        if self.N < 1 or self.M < 1:
            raise ConfigError("band exponents must be positive")
        if not is_rat(self.eps) or self.eps == 0:
            raise ConfigError("the lattice spacing must be a nonzero rational")
        if self.depth < self.N + self.M + 1:
            raise ConfigError("dressing depth too small for the band")

    def flow_range(self, n_max: int = 1):
        return [
            FlowIndex(alpha, n)
            for alpha in range(-self.M, self.N + 1)
            for n in range(n_max + 1)
        ]


@dataclass
class DressingPair:
    """Normalized dressing pair with memoized derived operators."""

    params: Params
    pL: LambdaOp
    pR: LambdaOp
    backend: str = "sampled"
    seed: int | None = None
    consistent: bool = True
    _cache: dict = field(default_factory=dict, repr=False)

    def cached(self, key, builder):
        if key not in self._cache:
            self._cache[key] = builder()
        return self._cache[key]

    @property
    def eps(self):
        return self.params.eps

    def pL_inv(self) -> LambdaOp:
        return self.cached("pL_inv", lambda: invert(self.pL, "monicLower"))

    def pR_inv(self) -> LambdaOp:
        return self.cached("pR_inv", lambda: invert(self.pR, "unitUpper"))


class LogOperator(NamedTuple):
    logPlus: LambdaOp
    logMinus: LambdaOp
    logL: LambdaOp


def harmonic(n: int):
    """Partial harmonic sum; the n = 0 value is zero."""
    total = RAT_ZERO
    for k in range(1, n + 1):
        total = total + Rat(1, k)
    return total


def gamma_ratio(flow: FlowIndex, params: Params):
    """Exact ratio of the two Gamma values attached to a flow index.

    Evaluates to 1 / prod_{j=0}^{n-1} (2 - s + j) with s = (alpha-1)/N
    for alpha >= 1 and s = -alpha/M otherwise; the functional equation
    of Gamma makes this exact for every admissible index.
    """
    alpha, n = flow
    if alpha >= 1:
        s = Rat(alpha - 1, params.N)
    else:
        s = Rat(-alpha, params.M)
    denom = RAT_ONE
    for j in range(n):
        denom = denom * (2 - s + j)
    return RAT_ONE / denom


def conjugated_left(d: DressingPair) -> LambdaOp:
    """Raw lower conjugation of the N-th shift power, window-limited."""
    return d.cached(
        "conj_left",
        lambda: d.pL * LambdaOp.shift_power(d.eps, d.params.N) * d.pL_inv(),
    )


def conjugated_right(d: DressingPair) -> LambdaOp:
    """Raw upper conjugation of the (-M)-th shift power, window-limited."""
    return d.cached(
        "conj_right",
        lambda: d.pR * LambdaOp.shift_power(d.eps, -d.params.M) * d.pR_inv(),
    )


def _certify_band(d: DressingPair, conj: LambdaOp, need_lo: bool) -> LambdaOp:
    N, M = d.params.N, d.params.M
    lo, hi = conj.exact
    if need_lo and (lo is None or lo > -M):
        raise WindowTooSmall("dressing depth cannot reach the low band edge")
    if not need_lo and (hi is None or hi < N):
        raise WindowTooSmall("dressing depth cannot reach the high band edge")
    # evolved states are meaningful only through their integration degree;
    # band vanishing is certified there, content above it is never asserted.
    deg = getattr(d, "exact_deg", None)
    for k, c in conj.coeffs.items():
        if k < -M or k > N:
            probe = c.truncate(deg) if deg is not None and hasattr(c, "truncate") else c
            if not ris_zero(probe):
                raise WindowTooSmall(
                    f"conjugation is not banded at shift power {k}; "
                    "state is inconsistent"
                )
    out = LambdaOp(d.eps, (None, None), (-M, N))
    out.coeffs = {k: c for k, c in conj.coeffs.items() if -M <= k <= N}
    return out


def lax_operator(d: DressingPair) -> LambdaOp:
    """Band operator via the lower conjugation, certified banded.

    For a consistent pair the conjugated shift power is supported on
    [-M, N]; the computed window is checked for that and the band
    annotation is tightened so later products keep their full windows.
    """
    return d.cached("lax", lambda: _certify_band(d, conjugated_left(d), True))


def lax_operator_right(d: DressingPair) -> LambdaOp:
    """Band operator via the upper conjugation (independent of the left)."""
    return d.cached("lax_right", lambda: _certify_band(d, conjugated_right(d), False))


def u_from_wL(d: DressingPair):
    """Closed-form band coefficients from the lower dressing data.

    Returns {j: u_j} for j = N-1 down to -M by peeling the triangular
    relation between the band operator and the lower dressing series.
    """
    N, M = d.params.N, d.params.M
    us = {N: RAT_ONE}

    def wcoef(a):
        if a == 0:
            return RAT_ONE
        return d.pL.coeff(-a)

    for j in range(1, N + M + 1):
        acc = wcoef(j)
        for a in range(1, j + 1):
            i = N - j + a
            if i < -M:
                continue
            ua = us.get(i)
            if ua is None or ris_zero(ua):
                continue
            acc = acc - ua * rshift(wcoef(a), i)
        us[N - j] = acc
    us.pop(N)
    return us


def u_from_wR(d: DressingPair):
    """Closed-form band coefficients from the upper dressing data.

    Returns {j: u_j} for j = -M up to N; the final entry plays the role
    of the normalization row and must equal one.
    """
    N, M = d.params.N, d.params.M
    us = {}
    for j in range(0, N + M + 1):
        acc = d.pR.coeff(j)
        for a in range(1, j + 1):
            i = -M + j - a
            if i > N:
                continue
            ua = us.get(i)
            if ua is None or ris_zero(ua):
                continue
            acc = acc - ua * rshift(d.pR.coeff(a), i)
        from .ring import rinverse

        us[-M + j] = acc * rinverse(rshift(d.pR.coeff(0), -M + j))
    return us


def roots(d: DressingPair):
    """Both fractional roots of the band operator."""
    def build():
        rootN = d.pL * LambdaOp.shift_power(d.eps, 1) * d.pL_inv()
        rootM = d.pR * LambdaOp.shift_power(d.eps, -1) * d.pR_inv()
        return rootN, rootM

    return d.cached("roots", build)


def logs(d: DressingPair) -> LogOperator:
    """The two dressed derivative operators and their balanced average."""
    def build():
        N, M = d.params.N, d.params.M
        eps = d.eps
        try:
            pLx = d.pL.map_coeffs(rderive)
            pRx = d.pR.map_coeffs(rderive)
        except DeriveUnsupported:
            raise DeriveUnsupported(
                "state was sampled without derivative jets"
            ) from None
        logPlus = (pLx * d.pL_inv()).scale(Rat(-N) * eps) + LambdaOp.dx(eps, Rat(N))
        logMinus = (pRx * d.pR_inv()).scale(Rat(M) * eps) + LambdaOp.dx(eps, Rat(-M))
        logL = logPlus.scale(Rat(1, 2 * N)) + logMinus.scale(Rat(1, 2 * M))
        assert ris_zero(logL.dpart)
        return LogOperator(logPlus, logMinus, logL)

    return d.cached("logs", build)


def _root_power(d: DressingPair, side: str, e: int) -> LambdaOp:
    """rootN^e or rootM^e with whole band powers split off and cached."""
    rootN, rootM = roots(d)
    step = d.params.N if side == "N" else d.params.M
    base = rootN if side == "N" else rootM
    q, r = divmod(e, step)
    key = ("power", side, e)

    def build():
        L = lax_operator(d)
        out = LambdaOp.identity(d.eps)
        for _ in range(q):
            out = out * L
        for _ in range(r):
            out = out * base
        return out

    return d.cached(key, build)


def b_op(d: DressingPair, flow: FlowIndex) -> LambdaOp:
    """Unprojected flow generator for one hierarchy index."""
    alpha, n = flow
    N, M = d.params.N, d.params.M
    if not (-M <= alpha <= N):
        raise ConfigError(f"flow index {flow} outside the admissible range")
    eps = d.eps
    if alpha >= 1:
        e = N * (n + 1) - alpha + 1
        return _root_power(d, "N", e).scale(gamma_ratio(flow, d.params) / eps)
    if alpha >= -M + 1:
        e = M * (n + 1) + alpha
        return _root_power(d, "M", e).scale(gamma_ratio(flow, d.params) / eps)
    # extended flows: balanced logarithm with the harmonic counterterm
    lg = logs(d).logL
    cn = Rat(1, 2) * (Rat(1, M) + Rat(1, N)) * harmonic(n)
    core = lg - LambdaOp.constant(eps, cn)
    Ln = _root_power(d, "N", N * n) if n else LambdaOp.identity(eps)
    fact = RAT_ONE
    for k in range(1, n + 1):
        fact = fact * k
    return (Ln * core).scale(Rat(2) / (eps * fact))


def b_op_minus_part(d: DressingPair, flow: FlowIndex) -> LambdaOp:
    """Negative projection of the flow generator.

    The (alpha, n) = (-M, 0) case is served from the lower dressing data
    alone, which keeps it available on one-sided states.
    """
    alpha, n = flow
    if alpha == -d.params.M and n == 0:
        pLx = d.pL.map_coeffs(rderive)
        return (pLx * d.pL_inv()).scale(-RAT_ONE)
    return project(b_op(d, flow), "minus")


def b_op_plus_part(d: DressingPair, flow: FlowIndex) -> LambdaOp:
    """Nonnegative projection of the flow generator (one-sided at (-M, 0))."""
    alpha, n = flow
    if alpha == -d.params.M and n == 0:
        pRx = d.pR.map_coeffs(rderive)
        return pRx * d.pR_inv()
    return project(b_op(d, flow), "plus")


def a_op(d: DressingPair, flow: FlowIndex) -> LambdaOp:
    """Projected generator entering the Lax equations."""
    alpha, _ = flow
    if alpha >= 1 or alpha == -d.params.M:
        return b_op_plus_part(d, flow)
    return -b_op_minus_part(d, flow)


# ---------------------------------------------------------------------------
# sampled states


def _draw_rat(rng: random.Random):
    num = rng.randint(-4, 4)
    den = rng.randint(1, 3)
    return Rat(num, den)


def _draw_jet(rng: random.Random, der: int, nonzero=False):
    vals = []
    for i in range(der + 1):
        v = _draw_rat(rng)
        if nonzero and i == 0:
            tries = 0
            while v == 0:
                v = _draw_rat(rng)
                tries += 1
                if tries > 100:
                    raise UnluckyZero("could not draw a nonzero value")
            # keep magnitudes tame so products stay cheap
        vals.append(v)
    return tuple(vals)


def sample_consistent_state(
    params: Params, seed: int, trivial: bool = False
) -> DressingPair:
    """Draw a random state on which both conjugations agree exactly.

    Band coefficient jets are drawn freely (the lowest one nonzero),
    boundary seeds are drawn for every dressing coefficient, and the
    triangular relations are solved site by site upward.  Deterministic
    for a given seed.  ``trivial`` forces the all-zero draw, which is
    rejected because the lowest band coefficient must not vanish.
    """
    rng = random.Random(seed)
    N, M, der = params.N, params.M, params.der
    T = params.depth
    # margins: each dressing level consumes sites on both ends, and the
    # operator products downstream consume up to `depth` more.
    margin = 2 * (T + 1) * max(N, M) + 2 * params.depth
    core = 2 * params.lattice_radius
    lo, hi = -core - margin, core + margin
    sites = list(range(lo, hi + 1, 2))

    def draw_fn(nonzero=False):
        if trivial:
            if nonzero:
                raise UnluckyZero("degenerate draw: lowest band value is zero")
            return LatticeFn.const(0, sites, der)
        return LatticeFn(
            {h: _draw_jet(rng, der, nonzero=nonzero) for h in sites}, der
        )

    us = {}
    for j in range(N - 1, -M, -1):
        us[j] = draw_fn()
    us[-M] = draw_fn(nonzero=True)
    us[N] = LatticeFn.const(1, sites, der)

    mid = len(sites) // 2

    # lower dressing: w_j(x) - w_j(x + N eps) = triangular source, seeded in
    # the middle and extended both ways so domains stay contiguous.
    ws = {0: LatticeFn.const(1, sites, der)}
    for j in range(1, T + 1):
        src = LatticeFn.const(0, sites, der)
        for a in range(0, j):
            i = N - j + a
            if i < -M:
                continue
            src = src + us[i] * ws[a].shift(i)
        vals = {h: _draw_jet(rng, der) for h in sites[mid : mid + N]}
        for h in sites:
            if h in vals:
                continue
            prev = h - 2 * N
            if prev in vals and prev in src.vals:
                vals[h] = jet_sub(vals[prev], src.vals[prev])
        for h in reversed(sites):
            if h in vals:
                continue
            nxt = h + 2 * N
            if nxt in vals and h in src.vals:
                vals[h] = jet_add(vals[nxt], src.vals[h])
        ws[j] = LatticeFn(vals, der)

    # upper dressing: w~_j(x) = u_{-M}(x) w~_j(x - M eps) + triangular source
    u_low_inv = us[-M].inverse()
    wts = {}
    for j in range(0, T + 1):
        src = LatticeFn.const(0, sites, der)
        for a in range(0, j):
            i = -M + j - a
            if i > N:
                continue
            src = src + us[i] * wts[a].shift(i)
        vals = {
            h: _draw_jet(rng, der, nonzero=(j == 0))
            for h in sites[mid : mid + M]
        }
        for h in sites:
            if h in vals:
                continue
            prev = h - 2 * M
            if prev in vals and h in us[-M].vals and h in src.vals:
                vals[h] = jet_add(jet_mul(us[-M].vals[h], vals[prev]), src.vals[h])
        for h in reversed(sites):
            if h in vals:
                continue
            nxt = h + 2 * M
            if nxt in vals and nxt in u_low_inv.vals and nxt in src.vals:
                vals[h] = jet_mul(
                    u_low_inv.vals[nxt], jet_sub(vals[nxt], src.vals[nxt])
                )
        wts[j] = LatticeFn(vals, der)

    eps = params.eps
    pL = LambdaOp(eps, (-T, None), (None, 0))
    pL.coeffs[0] = RAT_ONE
    for j in range(1, T + 1):
        if not ws[j].is_zero():
            pL.coeffs[-j] = ws[j]
    pR = LambdaOp(eps, (None, T), (0, None))
    for j in range(0, T + 1):
        if not wts[j].is_zero():
            pR.coeffs[j] = wts[j]
    return DressingPair(params, pL, pR, backend="sampled", seed=seed)


def trivial_pair(params: Params) -> DressingPair:
    """Both dressings equal to one.  Not consistent; one-sided tests only."""
    one_l = LambdaOp(params.eps, (None, None), (None, 0), {0: RAT_ONE})
    one_r = LambdaOp(params.eps, (None, None), (0, None), {0: RAT_ONE})
    return DressingPair(params, one_l, one_r, backend="trivial", consistent=False)


def symbolic_pair(params: Params) -> DressingPair:
    """Free-generator state for one-sided symbolic identities."""
    T = params.depth
    pL = LambdaOp(params.eps, (-T, None), (None, 0))
    pL.coeffs[0] = CoeffPoly.one()
    for j in range(1, T + 1):
        pL.coeffs[-j] = CoeffPoly.gen(Gen("w", j))
    pR = LambdaOp(params.eps, (None, T), (0, None))
    for j in range(0, T + 1):
        pR.coeffs[j] = CoeffPoly.gen(Gen("wt", j))
    return DressingPair(params, pL, pR, backend="symbolic", consistent=False)
