"""Exact rational scalars.

Everything in this package computes over exact rationals.  gmpy2's mpq is
used when available (it is much faster on deep towers of ring operations),
with fractions.Fraction as a drop-in fallback.  Both types normalise to
lowest terms and share the arithmetic operator surface, so the rest of the
code never needs to know which one is active.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import ConfigError

try:
    from gmpy2 import mpq as _mpq

    def Rat(num=0, den=1):
        return _mpq(num, den)

    _RAT_TYPES = (type(_mpq(0)), Fraction, int)
except ImportError:  # pragma: no cover - exercised only without gmpy2
    def Rat(num=0, den=1):
        return Fraction(num, den)

    _RAT_TYPES = (Fraction, int)

RAT_ZERO = Rat(0)
RAT_ONE = Rat(1)


def is_rat(value) -> bool:
    """True for plain scalars accepted anywhere a rational is expected."""
    return isinstance(value, _RAT_TYPES)


def rat_str(value) -> str:
    """Canonical "p/q" form ("p" when the denominator is 1)."""
    q = Rat(value)
    num, den = q.numerator, q.denominator
    return f"{num}" if den == 1 else f"{num}/{den}"


def parse_rat(text: str):
    """Parse "p" or "p/q" into an exact rational."""
    parts = text.strip().split("/")
    try:
        if len(parts) == 1:
            return Rat(int(parts[0]))
        if len(parts) == 2:
            num, den = int(parts[0]), int(parts[1])
            if den == 0:
                raise ConfigError(f"zero denominator in rational {text!r}")
            return Rat(num, den)
    except ValueError as exc:
        raise ConfigError(f"bad rational literal {text!r}") from exc
    raise ConfigError(f"bad rational literal {text!r}")


def binomial(n: int, k: int):
    """Exact binomial coefficient as a rational."""
    if k < 0 or k > n:
        return RAT_ZERO
    out = RAT_ONE
    for j in range(k):
        out = out * Rat(n - j, j + 1)
    return out
