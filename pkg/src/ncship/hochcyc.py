"""Hochschild chains and cochains, the (b*, B*) bicomplex and the tilde
construction.

Conventions.  A chain is a dict (v, (a_1..a_n)) -> coefficient, the module
element v first.  A cochain f_n : A[1]^n -> A* is a dict
((a_1..a_n), w) -> f(a_1..a_n)(w).  They pair by
<f, (v; a)> = f(a)(v), so the output slot of a cochain is evaluated on the
module element of a chain.  Under the identification of a chain (v; a) with
the cyclic 1-form word (dx_v x_a), b is the transpose of L_Q and b* = f o b.

A bimodule-map store is a dict (a, v, b, w) -> psi(a, v, b)(w); its cyclic
reading is the 2-marked word (w, a, v, b), with w and v marked.
"""

from fractions import Fraction
from itertools import product

from .errors import MalformedInput, PreconditionError
from .linalg import Echelon, matrix_rank
from .ncgeom import LETTER_X, CyclicForm, FormSpace, bimodmap_from_twoform, twoform_word
from .signcore import sign, swap_sign
from .sparse import add_term, all_words


def _par(deg, word):
    return sum(deg[a] for a in word) & 1


# ---------------------------------------------------------------- chains

def b_chain(A, chain, order=None):
    """Hochschild boundary.  Windows inside the tail get the prefix sign
    |v|' + |a_1..a_{i-1}|'; windows through v are rotated to the front
    with the full cyclic Koszul sign, then collapsed."""
    order = order or A.order
    deg = A.deg
    out = {}
    arities = sorted({len(k) for k in A.ops})
    for (v, a), c in chain.items():
        n = len(a)
        pre = deg[v]
        for i in range(n):
            for k in arities:
                if k == 0 or i + k > n:
                    continue
                vec = A.ops.get(a[i:i + k])
                if vec:
                    s = sign(pre)
                    for j, cj in vec.items():
                        add_term(out, (v, a[:i] + (j,) + a[i + k:]), cj * c if s > 0 else -(cj * c))
            pre += deg[a[i]]
        total = _par(deg, a) + deg[v]
        for t in range(n + 1):
            tail = a[n - t:] if t else ()
            ptail = _par(deg, tail)
            for h in range(n - t + 1):
                window = tail + (v,) + a[:h]
                vec = A.ops.get(window)
                if not vec:
                    continue
                s = sign(ptail * (total - ptail))
                mid = a[h:n - t]
                for j, cj in vec.items():
                    add_term(out, (j, mid), cj * c if s > 0 else -(cj * c))
    return {k: c for k, c in out.items() if len(k[1]) + 1 <= order}


def pair(f, chain):
    """<f, c> = sum f(a)(v) c(v; a)."""
    total = 0
    for (v, a), c in chain.items():
        val = f.get((a, v))
        if val:
            total = total + c * val
    return total


def chain_basis(dim, max_arity, reduced_unit=None):
    for n in range(max_arity + 1):
        for a in product(range(dim), repeat=n):
            if reduced_unit is not None and reduced_unit in a:
                continue
            for v in range(dim):
                yield (v, a)


# ---------------------------------------------------------------- cochains

class HochschildCochainSeq:
    """Sparse cochain f = sum_n f_n with f_n : A[1]^n -> A*."""

    def __init__(self, entries=None):
        self.entries = {}
        for (inputs, w), c in (entries or {}).items():
            add_term(self.entries, (tuple(inputs), w), c)

    def __eq__(self, other):
        return self.entries == getattr(other, "entries", other)

    __hash__ = None

    def __repr__(self):
        return "HochschildCochainSeq(%r)" % (self.entries,)

    def max_arity(self):
        return max((len(k[0]) for k in self.entries), default=-1)


def _entries(f):
    return getattr(f, "entries", f)


def truncate_cochain(f, max_arity):
    return {k: c for k, c in _entries(f).items() if len(k[0]) <= max_arity}


def is_reduced(f, unit):
    return all(unit not in inputs for inputs, _ in _entries(f))


def bstar(A, f, order=None):
    """b* f = f o b, computed by pushing each entry forward (the action of
    L_Q on the matching 1-form word).  Arities above N - 1 are dropped."""
    order = order or A.order
    deg = A.deg
    byout = {}
    for inputs, vec in A.ops.items():
        for j, c in vec.items():
            byout.setdefault(j, []).append((inputs, c))
    out = {}
    for (a, w), c in _entries(f).items():
        pre = deg[w]
        for p, letter in enumerate(a):
            s = sign(pre)
            for J, cj in byout.get(letter, ()):
                if len(a) - 1 + len(J) <= order - 1:
                    val = cj * c
                    add_term(out, (a[:p] + J + a[p + 1:], w), val if s > 0 else -val)
            pre += deg[letter]
        pa = _par(deg, a)
        for J, cj in byout.get(w, ()):
            if len(a) - 1 + len(J) > order - 1:
                continue
            pj = _par(deg, J)
            lp = 0
            for q, letter in enumerate(J):
                rest = (pj - lp - deg[letter]) & 1
                s = sign(lp * (deg[letter] + rest + pa))
                val = cj * c
                add_term(out, (J[q + 1:] + a + J[:q], letter), val if s > 0 else -val)
                lp = (lp + deg[letter]) & 1
    return out


def bstar_oracle(A, f, max_arity, reduced=False):
    """b* by the adjunction (b* f)(c) = f(b c), evaluated on every chain."""
    out = {}
    f = _entries(f)
    unit = A.unit if reduced else None
    for v, a in chain_basis(A.dim, max_arity, unit):
        val = pair(f, b_chain(A, {(v, a): 1}, max_arity + 1))
        if val:
            out[(a, v)] = val
    return out


def Bstar(A, f):
    """B* f(c_1..c_{n-1})(c_0) = sum over rotations r of (c_0..c_{n-1})
    with r's Koszul rotation sign of f(r)(I)."""
    unit = A.unit
    if unit is None:
        raise PreconditionError("B* needs a unital algebra")
    deg = A.deg
    out = {}
    for (a, w), c in _entries(f).items():
        if w != unit:
            continue
        pa = _par(deg, a)
        lp = 0
        for p, letter in enumerate(a):
            rest = (pa - lp - deg[letter]) & 1
            s = sign(lp * (deg[letter] + rest))
            add_term(out, (a[p + 1:] + a[:p], letter), c if s > 0 else -c)
            lp = (lp + deg[letter]) & 1
    return out


def dual_action(A, x, vstar, y, w):
    """Bimodule structure on A*: d*(x, v*, y)(w) = +- v*(m(y, w, x)); the
    sign moves y to the front of the cyclic word (w, x, v*, y)."""
    deg = A.deg
    vec = A.op(tuple(y) + (w,) + tuple(x))
    if not vec:
        return 0
    py = _par(deg, y)
    pv = vstar_parity(deg, vstar)
    s = sign(py * (deg[w] + _par(deg, x) + pv))
    total = 0
    for j, c in vec.items():
        val = vstar.get(j)
        if val:
            total = total + c * val
    return total if s > 0 else -total


def vstar_parity(deg, vstar):
    ps = {deg[j] & 1 for j in vstar}
    if len(ps) > 1:
        raise PreconditionError("dual element is not homogeneous")
    return ps.pop() if ps else 0


# ---------------------------------------------------------------- negative cyclic

class NegativeCyclicCochain:
    """Columns phi_0, phi_1, ..., phi_M."""

    def __init__(self, columns):
        self.columns = [dict(_entries(col)) for col in columns]

    @property
    def phi0(self):
        return self.columns[0] if self.columns else {}


def _diff(a, b):
    out = dict(a)
    for k, c in b.items():
        add_term(out, k, -c)
    return out


def validate_negative_cocycle(A, phi, order=None, max_arity=None):
    """Checks b* phi_i = B* phi_{i+1} and b* phi_M = 0 on arities where the
    truncation is exact (<= N - 1 unless max_arity is given)."""
    order = order or A.order
    max_arity = order - 1 if max_arity is None else max_arity
    cols = phi.columns if isinstance(phi, NegativeCyclicCochain) else [_entries(c) for c in phi]
    witnesses = []
    for i, col in enumerate(cols):
        left = bstar(A, col, order)
        right = Bstar(A, cols[i + 1]) if i + 1 < len(cols) else {}
        bad = {k: c for k, c in _diff(left, right).items() if len(k[0]) <= max_arity}
        if bad:
            k = min(bad, key=lambda t: (len(t[0]), t))
            witnesses.append({"column": i, "inputs": list(k[0]), "output": k[1],
                              "value": bad[k]})
    return {"valid": not witnesses, "witnesses": witnesses}


# ---------------------------------------------------------------- bimodule maps

def flip_sign(deg, a, v, b, w):
    """psi(b, w, a)(v) = flip_sign * psi(a, v, b)(w) for skew maps: minus the
    sign of rotating the block (w, a) past (v, b)."""
    return -sign((deg[w] + _par(deg, a)) * (deg[v] + _par(deg, b)))


def skew_defect(psi, deg):
    psi = _entries(psi)
    bad = {}
    for (a, v, b, w), c in psi.items():
        other = psi.get((b, w, a, v), 0)
        diff = other - flip_sign(deg, a, v, b, w) * c
        if diff:
            bad[(a, v, b, w)] = diff
    return bad


def tilde(A, phi, order=None):
    """phi~(a, v, b)(w) = phi0(a v b)(w) - (-1)^Kos phi0(b w a)(v), the sign
    being that of rotating (w, a) past (v, b)."""
    order = order or A.order
    phi0 = _phi0(phi)
    deg = A.deg
    out = {}
    for (c, w), val in phi0.items():
        if len(c) + 1 > order:
            continue
        for p in range(len(c)):
            a, v, b = c[:p], c[p], c[p + 1:]
            add_term(out, (a, v, b, w), val)
            add_term(out, (b, w, a, v), flip_sign(deg, a, v, b, w) * val)
    return out


def _marked_word(space, e):
    return twoform_word(*e)


def bimodule_defect(A, psi, order=None):
    """psi o m-hat - m* o psi-hat as a bimodule-map store: for each 2-marked
    cyclic word, the sum over windows with at most one mark of psi on the
    collapsed word.  Empty iff psi is an A-infinity bimodule map."""
    order = order or A.order
    psi = _entries(psi)
    space = FormSpace(A.deg, order)
    byout = {}
    for inputs, vec in A.ops.items():
        for j, c in vec.items():
            byout.setdefault(j, []).append((inputs, c))
    out = {}
    half = Fraction(-1, 2)
    # push each entry's 2-form word through one letter replacement and
    # collect canonical classes, then read the classes back as entries
    for e, c in psi.items():
        c = half * c
        word = _marked_word(space, e)
        hit = space.canon(word)
        if hit is None:
            continue
        pre = 0
        for p, letter in enumerate(word):
            marked = letter < LETTER_X
            idx = letter if marked else letter - LETTER_X
            s = sign(pre)
            for J, cj in byout.get(idx, ()):
                if len(word) - 1 + len(J) > order:
                    continue
                if marked:
                    for q in range(len(J)):
                        ins = tuple(LETTER_X + x for x in J[:q]) + (J[q],) + \
                            tuple(LETTER_X + x for x in J[q + 1:])
                        _collect(out, space, word[:p] + ins + word[p + 1:], s * cj * c)
                else:
                    ins = tuple(LETTER_X + x for x in J)
                    _collect(out, space, word[:p] + ins + word[p + 1:], s * cj * c)
            pre += space.par(letter)
    return bimodmap_from_twoform(CyclicForm(space, out))


def bimodule_defect_ordered(A, psi, order=None):
    """The bimodule equation without identifying the two marks: each
    2-marked word is kept in the rotation that starts at its output letter.
    Agrees with bimodule_defect on skew maps and also sees maps that are not
    skew."""
    order = order or A.order
    psi = _entries(psi)
    space = FormSpace(A.deg, order)
    byout = {}
    for inputs, vec in A.ops.items():
        for j, c in vec.items():
            byout.setdefault(j, []).append((inputs, c))
    out = {}
    for e, c in psi.items():
        word = _marked_word(space, e)
        pre = 0
        for p, letter in enumerate(word):
            marked = letter < LETTER_X
            idx = letter if marked else letter - LETTER_X
            s = sign(pre)
            for J, cj in byout.get(idx, ()):
                if len(word) - 1 + len(J) > order:
                    continue
                xs = tuple(LETTER_X + x for x in J)
                if not marked:
                    _collect_ordered(out, space, word[:p] + xs + word[p + 1:], 0, s * cj * c)
                    continue
                for q in range(len(J)):
                    ins = xs[:q] + (J[q],) + xs[q + 1:]
                    start = p + q if p == 0 else 0
                    _collect_ordered(out, space, word[:p] + ins + word[p + 1:], start,
                                     s * cj * c)
            pre += space.par(letter)
    return out


def _collect_ordered(out, space, word, start, coeff):
    if not coeff:
        return
    head, tail = word[:start], word[start:]
    s = swap_sign(sum(space.par(a) for a in head), space.word_sharp(head),
                  sum(space.par(a) for a in tail), space.word_sharp(tail))
    rot = tail + head
    k = next(i for i in range(1, len(rot)) if rot[i] < LETTER_X)
    e = (tuple(x - LETTER_X for x in rot[1:k]), rot[k],
         tuple(x - LETTER_X for x in rot[k + 1:]), rot[0])
    add_term(out, e, coeff if s > 0 else -coeff)


def _collect(out, space, word, coeff):
    hit = space.canon(word)
    if hit is None or not coeff:
        return
    key, s = hit
    add_term(out, key, coeff if s > 0 else -coeff)


def closedness_defect(psi, deg, order):
    """Three-term closedness identity over every cyclic word with three
    marked letters: the terms (mark i, out j), (mark j, out k), (mark k,
    out i), each read from the rotation that starts at its output."""
    psi = _entries(psi)
    space = FormSpace(deg, order)
    bad = {}
    dim = len(deg)
    for n in range(3, order + 1):
        for letters in product(range(dim), repeat=n):
            for i in range(n):
                for j in range(i + 1, n):
                    for k in range(j + 1, n):
                        word = tuple(x if t in (i, j, k) else LETTER_X + x
                                     for t, x in enumerate(letters))
                        total = 0
                        for mark, outp in ((i, j), (j, k), (k, i)):
                            rot = word[outp:] + word[:outp]
                            s = _rotation_sign(space, word, outp)
                            m = (mark - outp) % n
                            # rot = dx_w ... ; the entry reads (a, v, b)(w)
                            a = tuple(x - LETTER_X if x >= LETTER_X else x for x in rot[1:m])
                            b = tuple(x - LETTER_X if x >= LETTER_X else x for x in rot[m + 1:])
                            if any(x < LETTER_X for x in rot[1:m] + rot[m + 1:]):
                                # the third mark becomes a plain input
                                pass
                            val = psi.get((a, rot[m], b, rot[0]))
                            if val:
                                total = total + (val if s > 0 else -val)
                        if total:
                            bad[(word)] = total
    return bad


def _rotation_sign(space, word, k):
    left, right = word[:k], word[k:]
    return sign(space.word_par(left) * space.word_par(right)
                + space.word_sharp(left) * space.word_sharp(right))


def gram_matrix(psi, dim):
    psi = _entries(psi)
    return [[psi.get(((), i, (), j), Fraction(0)) for j in range(dim)] for i in range(dim)]


def is_nondegenerate(psi, dim):
    return matrix_rank(gram_matrix(psi, dim)) == dim


# ---------------------------------------------------------------- trace

def trace(A, phi0, c):
    """Tr(c) read off the arity-0 part of B* phi0."""
    return Bstar(A, phi0).get(((), c), 0)


def _phi0(phi):
    if isinstance(phi, NegativeCyclicCochain):
        return phi.phi0
    if isinstance(phi, (list, tuple)):
        return _entries(phi[0]) if phi else {}
    return _entries(phi)


def trace_compare(A, phi, order=None):
    """Compare Tr(m_2(a, b)) with phi~_{0,0}(a)(b) on all basis pairs."""
    phi0 = _phi0(phi)
    tr = Bstar(A, phi0)
    tl = tilde(A, phi0, order)
    rows = []
    for a in range(A.dim):
        for b in range(A.dim):
            lhs = 0
            for j, c in A.op((a, b)).items():
                t = tr.get(((), j))
                if t:
                    lhs = lhs + c * t
            rhs = tl.get(((), a, (), b), 0)
            rows.append({"a": a, "b": b, "trace": lhs, "tilde": rhs, "equal": lhs == rhs})
    return {"pass": all(r["equal"] for r in rows), "pairs": rows}


# ---------------------------------------------------------------- solver

def cochain_keys(A, max_arity, reduced=True, min_arity=0, degree=None):
    """Entry keys (inputs, w); degree filters on the total shifted degree
    of inputs plus output."""
    unit = A.unit if reduced else None
    deg = A.deg
    for n in range(min_arity, max_arity + 1):
        for a in product(range(A.dim), repeat=n):
            if unit is not None and unit in a:
                continue
            for w in range(A.dim):
                if degree is not None and sum(deg[x] for x in a) + deg[w] != degree:
                    continue
                yield (a, w)


def cocycle_space(A, columns, order=None, degree=None, reduced=True):
    """Basis of the solution space of b* phi_i = B* phi_{i+1}, b* phi_M = 0,
    where column i has total degree degree + 2 i.  Solved one order above
    N and truncated, so every identity holds exactly at arity <= N - 1."""
    order = order or A.order
    work = order + 1
    unknowns = []
    for i in range(columns):
        d = None if degree is None else degree + 2 * i
        for key in cochain_keys(A, work - 1, reduced, 0, d):
            unknowns.append((i, key))
    index = {u: n for n, u in enumerate(unknowns)}
    rows = {}
    for (i, key), n in index.items():
        unit_vec = {key: 1}
        for k2, c in bstar(A, unit_vec, work).items():
            if len(k2[0]) <= work - 1:
                rows.setdefault((i, k2), {})[n] = rows.setdefault((i, k2), {}).get(n, 0) + c
        if i >= 1:
            for k2, c in Bstar(A, unit_vec).items():
                if len(k2[0]) <= work - 2:
                    r = rows.setdefault((i - 1, k2), {})
                    r[n] = r.get(n, 0) - c
    from .linalg import nullspace
    basis = nullspace([r for r in rows.values() if any(r.values())], range(len(unknowns)))
    sols = []
    for vec in basis:
        cols = [{} for _ in range(columns)]
        for n, c in vec.items():
            i, key = unknowns[n]
            if len(key[0]) <= order - 1:
                add_term(cols[i], key, c)
        sols.append(cols)
    return sols


def random_cocycle(A, r, columns=2, order=None, degree=None, space_cache=None):
    """Random rational combination of cocycle_space; r is a random.Random."""
    key = (columns, order, degree)
    if space_cache is not None and key in space_cache:
        sols = space_cache[key]
    else:
        sols = cocycle_space(A, columns, order, degree)
        if space_cache is not None:
            space_cache[key] = sols
    cols = [{} for _ in range(columns)]
    for sol in sols:
        c = Fraction(r.randint(-3, 3), r.randint(1, 2))
        if not c:
            continue
        for i, col in enumerate(sol):
            for k, v in col.items():
                add_term(cols[i], k, c * v)
    return NegativeCyclicCochain(cols)
