"""The three reference algebras: S^2, CP^2 and quantum S^2 (see novikov)."""

from fractions import Fraction

from .barcx import AInftyStructure
from .signcore import BasisElement


def _cup_product(degrees, top):
    """m_2 on the truncated polynomial ring k[h]/h^(top+1), h of degree 2."""
    ops = {}
    for a in range(top + 1):
        for b in range(top + 1):
            if a + b <= top:
                ops[(a, b)] = {a + b: Fraction(1)}
    return ops


def sphere(order=8):
    basis = [BasisElement("u", 0, True), BasisElement("t", 2)]
    return AInftyStructure(basis, _cup_product([0, 2], 1), order)


def sphere_pairing():
    return [[Fraction(0), Fraction(1)], [Fraction(1), Fraction(0)]]


def cp2(order=8):
    basis = [BasisElement("u", 0, True), BasisElement("h", 2), BasisElement("h2", 4)]
    return AInftyStructure(basis, _cup_product([0, 2, 4], 2), order)


def cp2_pairing():
    return [[Fraction(1 if a + b == 2 else 0) for b in range(3)] for a in range(3)]


def truncated_polynomial(top, gen_degree, order=8):
    """k[e]/(e^(top+1)) with |e| = gen_degree and m_2(a, b) = (-1)^|a| ab.
    With an odd generator this exercises every parity in the sign rules."""
    basis = [BasisElement("u" if p == 0 else "e%d" % p, p * gen_degree, p == 0)
             for p in range(top + 1)]
    ops = {}
    for a in range(top + 1):
        for b in range(top + 1):
            if a + b <= top:
                ops[(a, b)] = {a + b: Fraction(-1 if (a * gen_degree) & 1 else 1)}
    return AInftyStructure(basis, ops, order)


def quantum_sphere(order=8, cutoff=4):
    """S^2 with m_2(t, t) = T u, as a filtered structure."""
    from .novikov import quantum_sphere as qs
    return qs(order, cutoff)
