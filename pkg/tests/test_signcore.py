from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from ncship.signcore import (BasisElement, GradedSymbol, as_rational, fmt_rational,
                             koszul_sign, prefix_sign, rotation_sign, sign, swap_sign)

ints = st.integers(-6, 6)


@given(ints, ints)
def test_sign_is_a_character(a, b):
    assert sign(a + b) == sign(a) * sign(b)
    assert sign(a) in (1, -1)


@given(ints, ints, ints, ints)
def test_swap_sign_symmetric(d1, s1, d2, s2):
    assert swap_sign(d1, s1, d2, s2) == swap_sign(d2, s2, d1, s1)


@given(st.lists(st.tuples(ints, st.integers(-1, 1)), min_size=3, max_size=3))
def test_koszul_sign_is_bilinear(blocks):
    a, b, c = [GradedSymbol(d, s) for d, s in blocks]
    assert koszul_sign([a, b], [c]) == koszul_sign([a], [c]) * koszul_sign([b], [c])


@given(st.lists(st.integers(0, 2), min_size=1, max_size=6), st.data())
def test_rotation_signs_compose(word, data):
    deg = [-1, 1, 0]
    word = tuple(word)
    j = data.draw(st.integers(0, len(word)))
    k = data.draw(st.integers(0, len(word)))
    once = word[j:] + word[:j]
    twice = once[k:] + once[:k]
    total = (j + k) % len(word)
    assert rotation_sign(deg, word, j) * rotation_sign(deg, once, k) == \
        rotation_sign(deg, word, total)
    assert twice == word[total:] + word[:total]


def test_prefix_sign_counts_the_prefix():
    deg = [-1, 1]
    assert prefix_sign(deg, (1, 1, 0), 2) == 1
    assert prefix_sign(deg, (1, 1, 0), 1) == -1
    assert prefix_sign(deg, (1,), 1, offset=1) == 1


@pytest.mark.parametrize("text,value", [("3/4", Fraction(3, 4)), ("-2", Fraction(-2)),
                                        (5, Fraction(5)), (" 1/3 ", Fraction(1, 3))])
def test_as_rational(text, value):
    assert as_rational(text) == value


@pytest.mark.parametrize("bad", ["0.5", "1e3", "", True, 1.5])
def test_as_rational_rejects_inexact(bad):
    with pytest.raises((TypeError, ValueError)):
        as_rational(bad)


@given(st.fractions())
def test_fmt_round_trip(q):
    assert as_rational(fmt_rational(q)) == q


def test_basis_shift():
    assert BasisElement("t", 2).shifted == 1
    with pytest.raises(ValueError):
        GradedSymbol(0, 2)
