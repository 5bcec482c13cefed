"""Bar tensor coalgebra: A-infinity structures as coderivations and
A-infinity morphisms as cohomomorphisms.

Words are tuples of basis indices.  A linear combination of words is a dict
word -> coefficient.  Coefficients are Fractions, or any object supporting
ring arithmetic with Fractions (Novikov scalars in the filtered layer).
"""

from fractions import Fraction

from .errors import ArityZeroError, MalformedInput, PreconditionError
from .signcore import BasisElement, sign
from .sparse import add_term, all_words


def _clean_ops(ops, dim, allow_arity_zero):
    clean = {}
    for inputs, outs in ops.items():
        inputs = tuple(inputs)
        if not inputs and not allow_arity_zero:
            raise ArityZeroError("m_0 is not allowed in unfiltered mode")
        for a in inputs:
            if not 0 <= a < dim:
                raise MalformedInput("unknown basis index %r in op %r" % (a, inputs))
        vec = {}
        for j, c in outs.items():
            if not 0 <= j < dim:
                raise MalformedInput("unknown output index %r in op %r" % (j, inputs))
            add_term(vec, j, c)
        if vec:
            clean[inputs] = vec
    return clean


class AInftyStructure:
    """Finite-dimensional A-infinity structure given by sparse structure
    constants ops[(j_1, ..., j_k)] = {i: a_i^{j_1...j_k}}."""

    def __init__(self, basis, ops=None, order=8, filtered=False, check_degrees=True):
        self.basis = [b if isinstance(b, BasisElement) else BasisElement(*b) for b in basis]
        ids = [b.id for b in self.basis]
        if len(set(ids)) != len(ids):
            raise MalformedInput("duplicate basis ids")
        if sum(1 for b in self.basis if b.is_unit) > 1:
            raise MalformedInput("at most one basis element may be the unit")
        if order < 1:
            raise MalformedInput("truncation order must be >= 1")
        self.order = order
        self.filtered = filtered
        self.dim = len(self.basis)
        self.deg = [b.degree - 1 for b in self.basis]
        self.ops = _clean_ops(ops or {}, self.dim, filtered)
        if check_degrees:
            self._check_degrees()
        self._by_arity = {}
        for inputs in self.ops:
            self._by_arity.setdefault(len(inputs), []).append(inputs)

    def _check_degrees(self):
        for inputs, outs in self.ops.items():
            want = sum(self.deg[a] for a in inputs) + 1
            for j in outs:
                got = self.deg[j]
                ok = (got - want) % 2 == 0 if self.filtered else got == want
                if not ok:
                    raise MalformedInput(
                        "op m(%s) -> %s has the wrong degree"
                        % (",".join(self.basis[a].id for a in inputs), self.basis[j].id))

    @property
    def unit(self):
        for i, b in enumerate(self.basis):
            if b.is_unit:
                return i
        return None

    def index(self, ident):
        for i, b in enumerate(self.basis):
            if b.id == ident:
                return i
        raise MalformedInput("unknown basis id %r" % (ident,))

    def arities(self):
        return sorted(self._by_arity)

    def is_minimal(self):
        return 1 not in self._by_arity

    def with_ops(self, ops, order=None, check_degrees=True):
        return AInftyStructure(self.basis, ops, order or self.order, self.filtered,
                               check_degrees)

    def op(self, inputs):
        return self.ops.get(tuple(inputs), {})

    def dhat(self, combo):
        out = {}
        for w, c in combo.items():
            for w2, c2 in hat_extend(self.ops, w, self.deg).items():
                add_term(out, w2, c * c2)
        return out


def hat_extend(m, word, deg, arity=None):
    """Coderivation extension of an operation family m (dict input -> output
    vector) applied to one word.  With arity given, only m_arity is used."""
    n = len(word)
    out = {}
    if arity is None:
        arities = sorted({len(k) for k in m})
    else:
        arities = [arity]
    for k in arities:
        if k > n:
            continue
        for i in range(n - k + 1):
            vec = m.get(word[i:i + k])
            if not vec:
                continue
            s = sign(sum(deg[a] for a in word[:i]))
            head, tail = word[:i], word[i + k:]
            for j, c in vec.items():
                add_term(out, head + (j,) + tail, c if s > 0 else -c)
    return out


def _check_word(A, w):
    for a in w:
        if not 0 <= a < A.dim:
            raise MalformedInput("unknown basis index %r" % (a,))


def ainfty_defect(A, order=None):
    """All nonzero coefficients of dhat(dhat(w)) over words of length <= N."""
    order = order or A.order
    memo = {}

    def dh(w):
        r = memo.get(w)
        if r is None:
            r = hat_extend(A.ops, w, A.deg)
            memo[w] = r
        return r

    defect = {}
    for w in all_words(A.dim, order, 0 if A.filtered else 1):
        out = {}
        for w1, c1 in dh(w).items():
            for w2, c2 in dh(w1).items():
                add_term(out, w2, c1 * c2)
        if out:
            defect[w] = out
    return defect


def aiformula_defect(A, order=None):
    """Coefficient-level A-infinity identities, used as a cross-check of
    ainfty_defect: for each input word, the length-one part of dhat^2."""
    order = order or A.order
    defect = {}
    for w in all_words(A.dim, order, 0 if A.filtered else 1):
        k = len(w)
        out = {}
        for k2 in range(0, k + 1):
            for i in range(0, k - k2 + 1):
                inner = A.ops.get(w[i:i + k2])
                if not inner:
                    continue
                eps = sign(sum(A.deg[a] for a in w[:i]))
                for l, a_l in inner.items():
                    outer = A.ops.get(w[:i] + (l,) + w[i + k2:])
                    if not outer:
                        continue
                    for s, a_s in outer.items():
                        add_term(out, s, eps * a_l * a_s)
        if out:
            defect[w] = out
    return defect


def unit_check(A):
    """Check the strict unit identities; returns a list of violations
    (empty list means pass)."""
    u = A.unit
    if u is None:
        raise PreconditionError("structure has no flagged unit")
    violations = []
    for inputs, outs in sorted(A.ops.items()):
        if u in inputs and len(inputs) != 2:
            violations.append({"identity": "vanishing", "arity": len(inputs),
                               "inputs": list(inputs), "value": dict(outs)})
    for x in range(A.dim):
        left = A.op((u, x))
        right = A.op((x, u))
        if left != {x: 1}:
            violations.append({"identity": "left", "arity": 2,
                               "inputs": [u, x], "value": dict(left)})
        want = {x: sign(A.basis[x].degree)}
        if right != want:
            violations.append({"identity": "right", "arity": 2,
                               "inputs": [x, u], "value": dict(right)})
    return violations


class Cohomomorphism:
    """A family f_k given by components[(j_1..j_k)] = {i: coefficient}."""

    def __init__(self, components, dim, order=8, filtered=False):
        self.dim = dim
        self.order = order
        comps = {}
        for inputs, outs in components.items():
            inputs = tuple(inputs)
            if not inputs and not filtered:
                raise ArityZeroError("f_0 is not allowed in unfiltered mode")
            vec = {}
            for j, c in outs.items():
                add_term(vec, j, c)
            if vec:
                comps[inputs] = vec
        self.components = comps
        self._max_arity = max((len(k) for k in comps), default=0)

    @classmethod
    def identity(cls, dim, order=8):
        return cls({(i,): {i: Fraction(1)} for i in range(dim)}, dim, order)

    def component(self, inputs):
        return self.components.get(tuple(inputs), {})

    def __eq__(self, other):
        return self.dim == other.dim and self.components == other.components

    def truncated(self, order):
        return Cohomomorphism({k: v for k, v in self.components.items() if len(k) <= order},
                              self.dim, order)


def cohom_extend(f, word, order=None):
    """f-hat on one word: sum over ordered partitions into blocks.  The f_k
    have degree 0 so no Koszul signs arise."""
    order = order or f.order
    n = len(word)
    # tails[i] = extension of word[i:]
    tails = [None] * (n + 1)
    tails[n] = {(): 1}
    for i in range(n - 1, -1, -1):
        acc = {}
        for j in range(i + 1, min(n, i + f._max_arity) + 1):
            vec = f.components.get(word[i:j])
            if not vec:
                continue
            for rest, c in tails[j].items():
                if len(rest) + 1 > order:
                    continue
                for out, a in vec.items():
                    add_term(acc, (out,) + rest, a * c)
        tails[i] = acc
    return tails[0]


def cohom_apply(f, combo, order=None):
    out = {}
    for w, c in combo.items():
        for w2, c2 in cohom_extend(f, w, order).items():
            add_term(out, w2, c * c2)
    return out


def homomorphism_defect(f, A, B, order=None):
    if f.dim != A.dim or f.dim != B.dim:
        raise MalformedInput("basis mismatch between the morphism and the algebras")
    order = order or min(A.order, B.order)
    defect = {}
    for w in all_words(A.dim, order, 1):
        left = B.dhat(cohom_extend(f, w, order + 1))
        right = cohom_apply(f, A.dhat({w: 1}), order + 1)
        out = dict(left)
        for k, c in right.items():
            add_term(out, k, -c)
        if out:
            defect[w] = out
    return defect


def compose_cohomomorphisms(f, g, order=None):
    """Components of f-hat o g-hat."""
    if f.dim != g.dim:
        raise MalformedInput("basis mismatch in composition")
    order = order or min(f.order, g.order)
    comps = {}
    for w in all_words(g.dim, order, 1):
        inner = cohom_extend(g, w, order)
        vec = {}
        for w2, c in inner.items():
            for j, a in f.components.get(w2, {}).items():
                add_term(vec, j, c * a)
        if vec:
            comps[w] = vec
    return Cohomomorphism(comps, f.dim, order)


def coproduct(word):
    """Deconcatenation on the augmented bar coalgebra."""
    return [(word[:i], word[i:]) for i in range(len(word) + 1)]
