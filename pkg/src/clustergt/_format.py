"""Number formatting shared by the CLI and report emitters.

Exact rationals print as terminating decimals when possible ("0.15"), as
"num/den" otherwise; floats use repr (shortest round-trip), keeping outputs
byte-stable across runs.
"""

from __future__ import annotations

from fractions import Fraction


def fmt_num(x) -> str:
    if x is None:
        return ""
    if isinstance(x, Fraction):
        return _fmt_fraction(x)
    if isinstance(x, float):
        return repr(x)
    return str(x)


def _fmt_fraction(x: Fraction) -> str:
    num, den = x.numerator, x.denominator
    if den == 1:
        return str(num)
    twos = 0
    fives = 0
    d = den
    while d % 2 == 0:
        d //= 2
        twos += 1
    while d % 5 == 0:
        d //= 5
        fives += 1
    if d != 1:
        return f"{num}/{den}"
    digits = max(twos, fives)
    scaled = abs(num) * 10 ** digits // den
    sign = "-" if num < 0 else ""
    text = str(scaled).rjust(digits + 1, "0")
    whole, frac = text[:-digits], text[-digits:]
    return f"{sign}{whole}.{frac}"


def parse_num(text: str):
    """Inverse of fmt_num for probabilities: decimal/ratio -> Fraction,
    other floats -> float."""
    text = text.strip()
    if "/" in text:
        return Fraction(text)
    try:
        return Fraction(text)
    except ValueError:
        return float(text)
