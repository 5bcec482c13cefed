"""Seeded random generators for forms, fields, cochains and structures."""

import random
from fractions import Fraction

from .ncgeom import LETTER_X, CyclicForm, FormalVectorField, NCPoly


def rng(seed):
    return seed if isinstance(seed, random.Random) else random.Random(seed)


def coeff(r, lo=-3, hi=3):
    c = 0
    while not c:
        c = Fraction(r.randint(lo, hi), r.choice((1, 1, 2, 3)))
    return c


def word(r, dim, n, n_dx=None):
    """Random letter word of length n; n_dx fixes the number of dx letters."""
    if n_dx is None:
        kinds = [r.random() < 0.4 for _ in range(n)]
    else:
        kinds = [True] * n_dx + [False] * (n - n_dx)
        r.shuffle(kinds)
    return tuple(r.randrange(dim) + (0 if k else LETTER_X) for k in kinds)


def form(r, space, terms=4, min_len=1, max_len=None, n_dx=None, cls=CyclicForm):
    max_len = max_len or space.order
    out = cls(space)
    for _ in range(terms):
        n = r.randint(min_len, max_len)
        k = None if n_dx is None else min(n_dx, n)
        out._add(word(r, space.dim, n, k), coeff(r))
    return out


def function(r, space, terms=3, min_len=0, max_len=3):
    return form(r, space, terms, min_len, max_len, n_dx=0, cls=NCPoly)


def field(r, space, terms=3, min_len=1, max_len=3, parity=None):
    """Random vector field; parity fixes the degree parity of every term."""
    comps = {}
    tries = 0
    while len(comps) < terms and tries < 50 * terms:
        tries += 1
        i = r.randrange(space.dim)
        n = r.randint(min_len, max_len)
        w = tuple(LETTER_X + r.randrange(space.dim) for _ in range(n))
        p = (space.word_par(w) + space.deg[i]) & 1
        if parity is not None and p != parity:
            continue
        comps.setdefault(i, {})[w] = coeff(r)
    return FormalVectorField(space, comps)


def cochain(r, A, terms=4, max_arity=4, min_arity=0, reduced=False, total=None):
    """Random cochain ((a_1..a_k), w) -> c.  reduced keeps the unit out of
    the inputs; total fixes |w|' + sum |a_i|'."""
    f = {}
    tries = 0
    while len(f) < terms and tries < 200 * terms:
        tries += 1
        k = r.randint(min_arity, max_arity)
        a = tuple(r.randrange(A.dim) for _ in range(k))
        w = r.randrange(A.dim)
        if reduced and A.unit in a:
            continue
        if total is not None and A.deg[w] + sum(A.deg[x] for x in a) != total:
            continue
        f[(a, w)] = coeff(r)
    return f


def chain(r, A, terms=3, max_arity=4):
    return {(r.randrange(A.dim), tuple(r.randrange(A.dim) for _ in range(r.randint(0, max_arity)))):
            coeff(r) for _ in range(terms)}


def structure_ops(Q):
    """Operations read off a vector field Q = sum a_i^J x_J d/dx_i."""
    ops = {}
    for i, w, c in Q.terms():
        ops.setdefault(tuple(a - LETTER_X for a in w), {})[i] = c
    return ops


def flow(Q, v):
    """e^{ad v} Q as a finite sum; v must raise the order."""
    from .ncgeom import vf_bracket
    total, term, k = Q, Q, 1
    while term:
        term = Fraction(1, k) * vf_bracket(v, term)
        total = total + term
        k += 1
    return total


def conjugated_structure(r, A, order=6, terms=3):
    """A transported along a random even flow: another A-infinity structure
    with higher operations, generally not of the original degrees."""
    from .barcx import AInftyStructure
    from .ncgeom import FormSpace, q_from_structure
    space = FormSpace(A.deg, order)
    v = field(r, space, terms, 2, 3, parity=0)
    Q = flow(q_from_structure(A, space), v)
    return AInftyStructure(A.basis, structure_ops(Q), order, check_degrees=False)


def exact_twoform(r, space, parity, terms=3, min_len=3, max_len=5, scalar=None):
    """d of a random 1-form, keeping only pieces whose words have the given
    parity; scalar(r) overrides the coefficient generator."""
    from .ncgeom import d_cyc
    out = CyclicForm(space)
    added = tries = 0
    while added < terms and tries < 50 * terms:
        tries += 1
        w = word(r, space.dim, r.randint(min_len, max_len), 1)
        piece = d_cyc(CyclicForm(space, {w: scalar(r) if scalar else coeff(r)}))
        if piece and all(space.word_par(x) == parity for x in piece.terms):
            out = out + piece
            added += 1
    return out
