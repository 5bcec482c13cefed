"""Noncommutative formal geometry dual to the bar construction.

Letters are small integers: ``dx_i`` is ``i`` and ``x_i`` is ``LETTER_X + i``,
so the natural integer order puts every dx before every x.  A letter for
basis element e_i has shifted degree of parity |e_i|' (the dual degree
-|e_i|' has the same parity) and form degree 1 for dx, 0 for x.

Two containers share one term store layout, word tuple -> coefficient:

* NCPoly, the free algebra on x_i and dx_i (plain noncommutative forms);
* CyclicForm, its quotient by graded commutators.  Keys are canonical
  rotations; the empty word holds constants.

The Cartan operators act on free words and CyclicForm re-canonicalizes.
"""

from fractions import Fraction
from math import factorial

from .errors import MalformedInput, PreconditionError
from .signcore import sign, swap_sign
from .sparse import add_term

LETTER_X = 1 << 20


def is_dx(code):
    return code < LETTER_X


def var(code):
    return code - LETTER_X if code >= LETTER_X else code


class FormSpace:
    """Gradings of the letters plus the truncation rule (total letter
    count <= order)."""

    def __init__(self, degrees, order=8):
        self.deg = list(degrees)
        self.dim = len(self.deg)
        self.order = order
        self._canon = {}

    @classmethod
    def of(cls, A, order=None):
        return cls(A.deg, order or A.order)

    def x(self, i):
        return LETTER_X + i

    def dx(self, i):
        return i

    def par(self, code):
        return self.deg[var(code)] & 1

    def word_par(self, word):
        return sum(self.deg[var(c)] for c in word) & 1

    def word_sharp(self, word):
        return sum(1 for c in word if c < LETTER_X) & 1

    def term_order(self, word, coeff):
        return len(word)

    def split(self, word, coeff):
        """Coefficient broken up by order: {order: part}."""
        return {len(word): coeff}

    def energy_free(self, coeff):
        """The part of a coefficient carrying no energy."""
        return coeff

    def keep(self, word, coeff):
        """Coefficient surviving truncation (zero when dropped)."""
        return coeff if len(word) <= self.order else 0

    def canon(self, word):
        """(canonical rotation, sign) or None when the class vanishes."""
        hit = self._canon.get(word, False)
        if hit is not False:
            return hit
        n = len(word)
        if n == 0:
            res = ((), 1)
        else:
            pars = [self.par(c) for c in word]
            sharps = [1 if c < LETTER_X else 0 for c in word]
            tp, ts = sum(pars), sum(sharps)
            best, best_sign, zero = None, 1, False
            lp = ls = 0
            for k in range(n):
                rot = word[k:] + word[:k]
                s = swap_sign(lp, ls, tp - lp, ts - ls)
                if best is None or rot < best:
                    best, best_sign, zero = rot, s, False
                elif rot == best and s != best_sign:
                    zero = True
                lp += pars[k]
                ls += sharps[k]
            res = None if zero else (best, best_sign)
        self._canon[word] = res
        return res


def canonicalize_cyclic(space, word):
    word = tuple(word)
    if not word:
        raise PreconditionError("the empty word is a scalar, not a cyclic word")
    return space.canon(word)


class _Terms:
    cyclic = False

    def __init__(self, space, terms=None):
        self.space = space
        self.terms = {}
        for w, c in (terms or {}).items():
            self._add(tuple(w), c)

    def _add(self, word, coeff):
        coeff = self.space.keep(word, coeff)
        if coeff:
            add_term(self.terms, word, coeff)

    def _new(self, terms=None):
        return type(self)(self.space, terms)

    def __add__(self, other):
        out = self._new(self.terms)
        for w, c in other.terms.items():
            out._add(w, c)
        return out

    def __sub__(self, other):
        out = self._new(self.terms)
        for w, c in other.terms.items():
            out._add(w, -c)
        return out

    def __neg__(self):
        return self._new({w: -c for w, c in self.terms.items()})

    def __rmul__(self, scalar):
        return self._new({w: scalar * c for w, c in self.terms.items()})

    def __eq__(self, other):
        if isinstance(other, int) and other == 0:
            return not self.terms
        return type(self) is type(other) and self.terms == other.terms

    __hash__ = None

    def __bool__(self):
        return bool(self.terms)

    def __repr__(self):
        return "%s(%r)" % (type(self).__name__, self.terms)

    def form_degrees(self):
        return sorted({sum(1 for c in w if c < LETTER_X) for w in self.terms})

    def min_order(self):
        return min((self.space.term_order(w, c) for w, c in self.terms.items()),
                   default=None)


class NCPoly(_Terms):
    """Element of the free algebra on the x and dx letters."""

    def __mul__(self, other):
        if not isinstance(other, NCPoly):
            return NotImplemented
        out = NCPoly(self.space)
        for w1, c1 in self.terms.items():
            for w2, c2 in other.terms.items():
                out._add(w1 + w2, c1 * c2)
        return out


class CyclicForm(_Terms):
    """Cyclic noncommutative form; keys are canonical representatives."""

    cyclic = True

    def _add(self, word, coeff):
        hit = self.space.canon(word)
        if hit is None:
            return
        key, s = hit
        coeff = self.space.keep(key, coeff)
        if coeff:
            add_term(self.terms, key, coeff if s > 0 else -coeff)


def cyclic(p):
    """Image of a free form in the cyclic quotient."""
    return CyclicForm(p.space, p.terms)


class FormalVectorField:
    """sum_i f_i(x) d/dx_i; components[i] is a dict of x-letter words."""

    def __init__(self, space, components=None):
        self.space = space
        self.components = {}
        for i, comp in (components or {}).items():
            vec = {}
            for w, c in comp.items():
                w = tuple(w)
                if any(is_dx(a) for a in w):
                    raise MalformedInput("vector field components are functions of x only")
                c = space.keep(w, c)
                if c:
                    add_term(vec, w, c)
            if vec:
                self.components[i] = vec

    def terms(self):
        for i, comp in self.components.items():
            for w, c in comp.items():
                yield i, w, c

    def term_par(self, i, word):
        return (self.space.word_par(word) + self.space.deg[i]) & 1

    def homogeneous_parts(self):
        parts = {}
        for i, w, c in self.terms():
            parts.setdefault(self.term_par(i, w), {}).setdefault(i, {})[w] = c
        return {p: FormalVectorField(self.space, comps) for p, comps in parts.items()}

    def parity(self):
        """Parity of a homogeneous field (0 for the zero field)."""
        ps = {self.term_par(i, w) for i, w, _ in self.terms()}
        if len(ps) > 1:
            raise PreconditionError("vector field is not homogeneous")
        return ps.pop() if ps else 0

    def __add__(self, other):
        comps = {i: dict(c) for i, c in self.components.items()}
        for i, w, c in other.terms():
            add_term(comps.setdefault(i, {}), w, c)
        return FormalVectorField(self.space, comps)

    def __sub__(self, other):
        return self + (-1) * other

    def __rmul__(self, scalar):
        return FormalVectorField(self.space, {
            i: {w: scalar * c for w, c in comp.items()} for i, comp in self.components.items()})

    def __eq__(self, other):
        return self.components == other.components

    __hash__ = None

    def __bool__(self):
        return bool(self.components)

    def __repr__(self):
        return "FormalVectorField(%r)" % (self.components,)

    def min_order(self):
        return min((self.space.term_order(w, c) for _, w, c in self.terms()), default=None)

    def apply(self, f):
        """The derivation xi acting on a function (NCPoly in x letters)."""
        space = self.space
        out = NCPoly(space)
        for p, part in self.homogeneous_parts().items():
            for w, c in f.terms.items():
                lp = 0
                for k, a in enumerate(w):
                    if is_dx(a):
                        raise MalformedInput("vector fields act on functions only")
                    comp = part.components.get(var(a))
                    if comp:
                        s = sign(p * lp)
                        head, tail = w[:k], w[k + 1:]
                        for j, cj in comp.items():
                            out._add(head + j + tail, c * cj if s > 0 else -(c * cj))
                    lp += space.par(a)
        return out


def q_from_structure(A, space=None):
    """Q_i = sum a_i^J x_J d/dx_i with the index order of the inputs."""
    space = space or FormSpace.of(A)
    comps = {}
    for inputs, outs in A.ops.items():
        word = tuple(LETTER_X + j for j in inputs)
        for i, c in outs.items():
            add_term(comps.setdefault(i, {}), word, c)
    Q = FormalVectorField(space, comps)
    for i, w, _ in Q.terms():
        if not Q.term_par(i, w):
            raise PreconditionError("m(%s) -> %s has even parity; the operations do not "
                                    "define an odd vector field"
                                    % (",".join(str(a - LETTER_X) for a in w), i))
    return Q


def _rebuild(form, terms_iter):
    out = type(form)(form.space)
    for w, c in terms_iter:
        out._add(w, c)
    return out


def _d_terms(form):
    for w, c in form.terms.items():
        sh = 0
        for k, a in enumerate(w):
            if is_dx(a):
                sh ^= 1
                continue
            yield w[:k] + (a - LETTER_X,) + w[k + 1:], (-c if sh else c)


def d_cyc(form):
    """Exterior derivative, a derivation of form degree 1."""
    return _rebuild(form, _d_terms(form))


def _contract_terms(xi, form):
    space = form.space
    for p, part in xi.homogeneous_parts().items():
        for w, c in form.terms.items():
            lp = sh = 0
            for k, a in enumerate(w):
                if is_dx(a):
                    comp = part.components.get(a)
                    if comp:
                        s = sign(p * lp + sh)
                        head, tail = w[:k], w[k + 1:]
                        for j, cj in comp.items():
                            yield head + j + tail, (c * cj if s > 0 else -(c * cj))
                    sh ^= 1
                lp += space.par(a)


def contract(xi, form):
    """Interior product i_xi: i(x) = 0, i(dx_i) = xi_i."""
    return _rebuild(form, _contract_terms(xi, form))


def lie_derivative(xi, form):
    """L_xi = d i_xi + i_xi d."""
    return d_cyc(contract(xi, form)) + contract(xi, d_cyc(form))


def vf_bracket(xi, eta):
    """Graded commutator of derivations, as a vector field."""
    space = xi.space
    comps = {}
    for p, a in xi.homogeneous_parts().items():
        for q, b in eta.homogeneous_parts().items():
            s = sign(p * q)
            for i in range(space.dim):
                bi = b.components.get(i)
                if bi:
                    for w, c in a.apply(NCPoly(space, bi)).terms.items():
                        add_term(comps.setdefault(i, {}), w, c)
                ai = a.components.get(i)
                if ai:
                    for w, c in b.apply(NCPoly(space, ai)).terms.items():
                        add_term(comps.setdefault(i, {}), w, -c if s > 0 else c)
    return FormalVectorField(space, comps)


def poincare_H(form):
    """Homotopy with dH + Hd = Id on constant-free forms: the derivation
    dx -> x (sign by form degree of the prefix) scaled by 1/length."""
    if () in form.terms:
        raise PreconditionError("poincare_H is defined on constant-free forms only")

    def gen():
        for w, c in form.terms.items():
            scale = Fraction(1, len(w))
            sh = 0
            for k, a in enumerate(w):
                if is_dx(a):
                    cc = scale * c
                    yield w[:k] + (a + LETTER_X,) + w[k + 1:], (-cc if sh else cc)
                    sh ^= 1
    return _rebuild(form, gen())


def _entries(store):
    return getattr(store, "entries", store)


def oneform_from_cochain(eta, space):
    """alpha_eta = sum eta(a)(v) (dx_v x_a)_c; entries keyed (inputs, out)."""
    out = CyclicForm(space)
    for (inputs, j), c in _entries(eta).items():
        out._add((j,) + tuple(LETTER_X + a for a in inputs), c)
    return out


def cochain_from_oneform(form):
    entries = {}
    for w, c in form.terms.items():
        if not w or not is_dx(w[0]) or any(is_dx(a) for a in w[1:]):
            raise MalformedInput("not a 1-form word: %r" % (w,))
        entries[(tuple(a - LETTER_X for a in w[1:]), w[0])] = c
    return entries


def twoform_word(a, v, b, w):
    return (w,) + tuple(LETTER_X + i for i in a) + (v,) + tuple(LETTER_X + i for i in b)


def twoform_from_bimodmap(psi, space, check=True):
    """omega_psi = -1/2 sum psi(a, v, b)(w) (dx_w x_a dx_v x_b)_c."""
    entries = _entries(psi)
    if check:
        from .hochcyc import skew_defect
        bad = skew_defect(entries, space.deg)
        if bad:
            raise PreconditionError("bimodule map is not skew symmetric; witness %r"
                                    % (next(iter(bad)),))
    out = CyclicForm(space)
    half = Fraction(-1, 2)
    for (a, v, b, w), c in entries.items():
        out._add(twoform_word(a, v, b, w), half * c)
    return out


def bimodmap_from_twoform(form):
    """Skew bimodule-map store whose 2-form is the given one."""
    from .hochcyc import flip_sign
    space = form.space
    entries = {}
    for word, c in form.terms.items():
        pos = [k for k, a in enumerate(word) if is_dx(a)]
        if len(pos) != 2 or pos[0] != 0:
            raise MalformedInput("not a 2-form word: %r" % (word,))
        k = pos[1]
        w, v = word[0], word[k]
        a = tuple(x - LETTER_X for x in word[1:k])
        b = tuple(x - LETTER_X for x in word[k + 1:])
        e, e2 = (a, v, b, w), (b, w, a, v)
        val = -2 * c if e == e2 else -c
        entries[e] = entries.get(e, 0) + val
        if e2 != e:
            entries[e2] = entries.get(e2, 0) + flip_sign(space.deg, a, v, b, w) * val
    return {k: c for k, c in entries.items() if c}


def _substitute(form, images):
    space = form.space
    out = type(form)(space)
    # every image word has length >= 1 and order >= length, so a partial
    # word that cannot fit the remaining letters is dropped before any
    # coefficient arithmetic
    by_len = {a: sorted(im.items(), key=lambda kv: len(kv[0])) for a, im in images.items()}
    for w, c in form.terms.items():
        partial = {(): c}
        n = len(w)
        for p, a in enumerate(w):
            room = space.order - (n - p - 1)
            nxt = {}
            for pw, pc in partial.items():
                for iw, ic in by_len[a]:
                    nw = pw + iw
                    if len(nw) > room:
                        break
                    nc = space.keep(nw, pc * ic)
                    if nc:
                        add_term(nxt, nw, nc)
            partial = nxt
            if not partial:
                break
        for pw, pc in partial.items():
            out._add(pw, pc)
    return out


def pullback_by_cohom(F, form):
    """Substitute x_i -> sum F_i^J x_J and dx_i -> d of that series."""
    space = form.space
    xs = {}
    for inputs, outs in F.components.items():
        word = tuple(LETTER_X + j for j in inputs)
        for i, c in outs.items():
            add_term(xs.setdefault(i, {}), word, c)
    images = {}
    for i in range(space.dim):
        series = NCPoly(space, xs.get(i, {}))
        images[LETTER_X + i] = series.terms
        images[i] = d_cyc(series).terms
    return _substitute(form, images)


def exp_lie(v, form):
    """e^{L_v} as a finite sum; v must raise the order by at least one."""
    mo = v.min_order()
    if mo is not None and mo < 2:
        raise PreconditionError("exp_lie needs a vector field of order >= 2")
    total = form
    term = form
    k = 1
    while term:
        term = Fraction(1, k) * lie_derivative(v, term)
        total = total + term
        k += 1
    return total


def exp_series_coefficient(k):
    """a_k = 1/k! - 1/(k+1)!, the weight of L_v^k alpha in the updated
    primitive after one exponential step."""
    return Fraction(1, factorial(k)) - Fraction(1, factorial(k + 1))
