"""Exact scalars and the Koszul sign engine.

Every sign in the package is produced here.  Gradings are the shifted
degree ``|.|'`` and the form degree ``sharp``; a block ``f`` moving past a
block ``g`` picks up ``(-1)^(|f|'|g|' + sharp(f) sharp(g))``.
"""

from dataclasses import dataclass
from fractions import Fraction

Rational = Fraction


def as_rational(value):
    """Parse an int, Fraction or a "p/q" string exactly."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        text = value.strip()
        if not text or any(ch in text for ch in ".eE "):
            raise ValueError("not an exact rational: %r" % value)
        return Fraction(text)
    raise TypeError("cannot read %r as a rational" % (value,))


def fmt_rational(q):
    q = Fraction(q)
    if q.denominator == 1:
        return str(q.numerator)
    return "%d/%d" % (q.numerator, q.denominator)


@dataclass(frozen=True)
class BasisElement:
    id: str
    degree: int
    is_unit: bool = False

    @property
    def shifted(self):
        return self.degree - 1


@dataclass(frozen=True)
class GradedSymbol:
    shifted_degree: int
    sharp: int = 0

    def __post_init__(self):
        if self.sharp not in (-1, 0, 1):
            raise ValueError("sharp must be -1, 0 or 1")


def sign(exponent):
    """(-1)**exponent for any integer exponent."""
    return -1 if exponent & 1 else 1


def swap_sign(deg_left, sharp_left, deg_right, sharp_right):
    """Sign for moving a block of total gradings (deg_left, sharp_left)
    past a block of total gradings (deg_right, sharp_right)."""
    return sign(deg_left * deg_right + sharp_left * sharp_right)


def koszul_sign(left, right):
    dl = sum(s.shifted_degree for s in left)
    sl = sum(s.sharp for s in left)
    dr = sum(s.shifted_degree for s in right)
    sr = sum(s.sharp for s in right)
    return swap_sign(dl, sl, dr, sr)


def shifted_degree_of_word(word):
    return sum(e.degree - 1 for e in word)


def prefix_sign(degree_of, word, upto, offset=0):
    """(-1)^(offset + degrees of word[:upto]); the coderivation prefix sign."""
    total = offset
    for a in word[:upto]:
        total += degree_of[a]
    return sign(total)


def rotation_sign(degree_of, word, k):
    """Sign for the cyclic rotation word -> word[k:] + word[:k] of a word of
    plain (sharp 0) letters."""
    left = sum(degree_of[a] for a in word[:k])
    right = sum(degree_of[a] for a in word[k:])
    return sign(left * right)
