"""Gapped filtered layer.

Scalars are truncated Novikov series sum c_i T^{lambda_i} with rational
exponents below an energy cutoff E.  Operations carry tags beta = (lambda, mu)
in a gapped monoid G; the Maslov parameter only enters through its parity.
The order of a term with energy lambda_j and word length n is 2j + n.
"""

from fractions import Fraction

from .barcx import AInftyStructure, homomorphism_defect
from .errors import MalformedInput, Obstruction, PreconditionError
from .hochcyc import bimodule_defect_ordered, skew_defect
from .ncgeom import CyclicForm, FormSpace
from .signcore import BasisElement, as_rational
from .sparse import add_term
from . import sympeq


def _q(x):
    return x if isinstance(x, Fraction) else Fraction(x)


class NovikovScalar:
    """sum terms[lam] T^lam, every lam < cutoff (None means no cutoff)."""

    __slots__ = ("terms", "cutoff")

    def __init__(self, terms=None, cutoff=None):
        self.cutoff = None if cutoff is None else _q(cutoff)
        self.terms = {}
        for lam, c in (terms or {}).items():
            lam = _q(lam)
            if c and (self.cutoff is None or lam < self.cutoff):
                self.terms[lam] = self.terms.get(lam, 0) + _q(c)
                if not self.terms[lam]:
                    del self.terms[lam]

    @classmethod
    def T(cls, lam, cutoff=None, coeff=1):
        return cls({lam: coeff}, cutoff)

    def _cut(self, other):
        a, b = self.cutoff, getattr(other, "cutoff", None)
        if a is None:
            return b
        return a if b is None else min(a, b)

    def _lift(self, other):
        if isinstance(other, NovikovScalar):
            return other
        if isinstance(other, (int, Fraction)):
            return NovikovScalar({0: other}, self.cutoff)
        return None

    def __add__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        terms = dict(self.terms)
        for lam, c in o.terms.items():
            terms[lam] = terms.get(lam, 0) + c
        return NovikovScalar(terms, self._cut(o))

    __radd__ = __add__

    def __neg__(self):
        return NovikovScalar({lam: -c for lam, c in self.terms.items()}, self.cutoff)

    def __sub__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        cut = self._cut(o)
        terms = {}
        for l1, c1 in self.terms.items():
            for l2, c2 in o.terms.items():
                lam = l1 + l2
                if cut is None or lam < cut:
                    terms[lam] = terms.get(lam, 0) + c1 * c2
        return NovikovScalar(terms, cut)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self * (1 / _q(other))
        return NotImplemented

    def __eq__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return self.terms == o.terms

    __hash__ = None

    def __bool__(self):
        return bool(self.terms)

    def __repr__(self):
        if not self.terms:
            return "0"
        return " + ".join("%s*T^%s" % (c, lam) for lam, c in sorted(self.terms.items()))

    def valuation(self):
        if not self.terms:
            raise ValueError("the zero scalar has no valuation")
        return min(self.terms)

    def constant_part(self):
        return self.terms.get(Fraction(0), Fraction(0))

    def is_constant(self):
        return all(lam == 0 for lam in self.terms)


def valuation(c):
    """Valuation of a rational or Novikov coefficient (rationals sit at 0)."""
    if isinstance(c, NovikovScalar):
        return c.valuation()
    if not c:
        raise ValueError("the zero scalar has no valuation")
    return Fraction(0)


def energy_parts(c):
    """{lam: rational} for any coefficient."""
    if isinstance(c, NovikovScalar):
        return dict(c.terms)
    return {Fraction(0): _q(c)} if c else {}


# ------------------------------------------------------------------ monoid

class GappedMonoid:
    """Submonoid of R_{>=0} x 2Z generated by finitely many (lam, mu)."""

    def __init__(self, generators=(), cutoff=4):
        self.generators = sorted({(_q(l), int(m)) for l, m in generators})
        self.cutoff = _q(cutoff)

    def violations(self, extra=()):
        """Failures of the three gapped conditions for the monoid generated
        by the generators together with extra."""
        gens = sorted(set(self.generators) | {(_q(l), int(m)) for l, m in extra})
        bad = []
        for lam, mu in gens:
            if lam < 0:
                bad.append({"condition": "discrete", "beta": [lam, mu],
                            "reason": "negative energy gives an energy set unbounded below"})
            if mu % 2:
                bad.append({"condition": "maslov", "beta": [lam, mu],
                            "reason": "the Maslov component must be even"})
            if lam == 0 and mu != 0:
                bad.append({"condition": "zero_energy", "beta": [lam, mu],
                            "reason": "G meets {0} x 2Z outside (0,0)"})
                bad.append({"condition": "finite_fiber", "beta": [lam, mu],
                            "reason": "the fibre over energy 0 is infinite"})
        return bad

    def elements(self, bound=None):
        """All elements with energy < bound (default: the cutoff)."""
        bound = self.cutoff if bound is None else _q(bound)
        if self.violations():
            raise PreconditionError("the monoid is not gapped")
        seen = {(Fraction(0), 0)}
        frontier = [(Fraction(0), 0)]
        gens = [g for g in self.generators if g != (0, 0)]
        while frontier:
            nxt = []
            for lam, mu in frontier:
                for gl, gm in gens:
                    e = (lam + gl, mu + gm)
                    if e[0] < bound and e not in seen:
                        seen.add(e)
                        nxt.append(e)
            frontier = nxt
        return sorted(seen)

    def energies(self):
        """The increasing sequence lam_0 = 0 < lam_1 < ... below the cutoff."""
        return sorted({lam for lam, _ in self.elements()})

    def contains(self, beta):
        lam = _q(beta[0])
        if lam < 0:
            return False
        bound = max(self.cutoff, lam + 1)
        return (lam, int(beta[1])) in set(self.elements(bound))


def order(lam, length, energies):
    """2j + length where lam is the j-th energy of the monoid."""
    lam = _q(lam)
    try:
        j = list(energies).index(lam)
    except ValueError:
        raise MalformedInput("exponent %s is not in the energy sequence %s"
                             % (lam, [str(e) for e in energies]))
    return 2 * j + length


class NovikovFormSpace(FormSpace):
    """Forms with Novikov coefficients, truncated by order instead of length."""

    def __init__(self, degrees, order=8, energies=(0,), cutoff=None):
        super().__init__(degrees, order)
        self.energies = [_q(e) for e in energies]
        self._index = {e: j for j, e in enumerate(self.energies)}
        self.cutoff = None if cutoff is None else _q(cutoff)

    def _j(self, lam):
        j = self._index.get(lam)
        if j is None:
            raise MalformedInput("exponent %s is not in the energy sequence" % (lam,))
        return j

    def split(self, word, coeff):
        parts = {}
        for lam, c in energy_parts(coeff).items():
            o = 2 * self._j(lam) + len(word)
            parts.setdefault(o, {})[lam] = c
        return {o: NovikovScalar(t, self.cutoff) for o, t in parts.items()}

    def term_order(self, word, coeff):
        return min(self.split(word, coeff))

    def keep(self, word, coeff):
        if not isinstance(coeff, NovikovScalar):
            return coeff if len(word) <= self.order else 0
        n = len(word)
        kept = {lam: c for lam, c in coeff.terms.items()
                if 2 * self._j(lam) + n <= self.order}
        if len(kept) == len(coeff.terms):
            return coeff
        return NovikovScalar(kept, coeff.cutoff)

    def energy_free(self, coeff):
        if isinstance(coeff, NovikovScalar):
            return coeff.constant_part()
        return coeff


# ------------------------------------------------------------------ structures

ZERO_BETA = (Fraction(0), 0)


class FilteredAInfty:
    """Operations m_{k,beta}, stored as tagged[(inputs, beta)] = {out: c};
    base carries the summed operations m_k = sum_beta T^lam(beta) m_{k,beta}."""

    def __init__(self, basis, tagged, monoid, order=8):
        self.monoid = monoid
        self.cutoff = monoid.cutoff
        self.order = order
        basis = [b if isinstance(b, BasisElement) else BasisElement(*b) for b in basis]
        self.tagged = {}
        for (inputs, beta), outs in tagged.items():
            key = (tuple(inputs), (_q(beta[0]), int(beta[1])))
            vec = self.tagged.setdefault(key, {})
            for j, c in outs.items():
                add_term(vec, j, _q(c))
        self.tagged = {k: v for k, v in self.tagged.items() if v}
        combined = {}
        for (inputs, beta), outs in self.tagged.items():
            vec = combined.setdefault(inputs, {})
            for j, c in outs.items():
                add_term(vec, j, NovikovScalar.T(beta[0], self.cutoff, c))
        self.base = AInftyStructure(basis, combined, order, filtered=True)

    @classmethod
    def from_unfiltered(cls, A, cutoff=4):
        tagged = {(k, ZERO_BETA): v for k, v in A.ops.items()}
        return cls(A.basis, tagged, GappedMonoid([(0, 0)], cutoff), A.order)

    @property
    def deg(self):
        return self.base.deg

    @property
    def dim(self):
        return self.base.dim

    def betas(self):
        return sorted({beta for _, beta in self.tagged})

    def slice(self, beta):
        """The rational structure m_{*,beta}."""
        beta = (_q(beta[0]), int(beta[1]))
        ops = {k: v for (k, b), v in self.tagged.items() if b == beta}
        return AInftyStructure(self.base.basis, ops, self.order, filtered=True,
                               check_degrees=False)

    def with_tagged(self, tagged):
        return FilteredAInfty(self.base.basis, tagged, self.monoid, self.order)

    def space(self, order=None):
        return NovikovFormSpace(self.deg, order or self.order, self.monoid.energies(),
                                self.cutoff)

    def is_canonical(self):
        return not any(len(k) <= 1 and b == ZERO_BETA for k, b in self.tagged)


def quantum_sphere(order=8, cutoff=4):
    """S^2 with the quantum correction m_{2,(1,2)}(t, t) = u."""
    basis = [BasisElement("u", 0, True), BasisElement("t", 2)]
    tagged = {((0, 0), ZERO_BETA): {0: 1}, ((0, 1), ZERO_BETA): {1: 1},
              ((1, 0), ZERO_BETA): {1: 1}, ((1, 1), (1, 2)): {0: 1}}
    return FilteredAInfty(basis, tagged, GappedMonoid([(1, 2)], cutoff), order)


def as_filtered(A, cutoff=4):
    return A if isinstance(A, FilteredAInfty) else FilteredAInfty.from_unfiltered(A, cutoff)


def rational_base(A):
    """The summed structure with rational coefficients; only defined when no
    operation carries energy."""
    A = as_filtered(A)
    ops = {}
    for inputs, vec in A.base.ops.items():
        out = {}
        for j, c in vec.items():
            if isinstance(c, NovikovScalar):
                if not c.is_constant():
                    raise PreconditionError("m(%s) carries energy; the cocycle solver works "
                                            "over the rationals only"
                                            % ",".join(A.base.basis[i].id for i in inputs))
                c = c.constant_part()
            if c:
                out[j] = c
        if out:
            ops[inputs] = out
    return AInftyStructure(A.base.basis, ops, A.order)


# ------------------------------------------------------------------ checks

def gapped_validate(G, A):
    """The gapped conditions for G enlarged by A's tags, and tag membership."""
    A = as_filtered(A, G.cutoff)
    tags = A.betas()
    conditions = {"discrete": True, "maslov": True, "zero_energy": True, "finite_fiber": True}
    bad = G.violations(tags)
    for v in bad:
        conditions[v["condition"]] = False
    missing = []
    if not G.violations():
        missing = [list(b) for b in tags if not G.contains(b)]
    return {"conditions": conditions, "violations": bad, "untagged": missing,
            "pass": not bad and not missing}


def _by_order(store, space):
    """Drop coefficient parts of order > N, keyed by the input word."""
    out = {}
    for w, vec in store.items():
        kept = {}
        for j, c in vec.items():
            c = space.keep(w, c)
            if c:
                kept[j] = c
        if kept:
            out[w] = kept
    return out


def filtered_ainfty_defect(A, order=None):
    """dhat o dhat on every word, keeping only parts of order <= N."""
    from .barcx import ainfty_defect
    A = as_filtered(A)
    order = order or A.order
    space = A.space(order)
    return _by_order(ainfty_defect(A.base, order), space)


def filtered_cyclicity(A, pairing, order=None):
    """The cyclic symmetry equation per (k, beta), plus L_Q omega for the
    summed structure as the second route."""
    A = as_filtered(A)
    order = order or A.order
    per_beta = {}
    for beta in A.betas():
        eq = sympeq.cyclicity_defect(A.slice(beta), pairing, order)["equation"]
        if eq:
            per_beta[beta] = eq
    whole = sympeq.cyclicity_defect(A.base, pairing, order)
    return {"per_beta": per_beta, "equation": whole["equation"],
            "lie_derivative": whole["lie_derivative"],
            "agree": (not per_beta) == (not whole["lie_derivative"]),
            "pass": not per_beta and not whole["lie_derivative"]}


def filtered_homomorphism_defect(F, A, order=None):
    A = as_filtered(A)
    order = order or A.order
    return _by_order(homomorphism_defect(F, A.base, A.base, order), A.space(order))


# ------------------------------------------------------------------ darboux

def _negative_terms(terms):
    out = []
    for w, c in terms.items():
        for lam, a in energy_parts(c).items():
            if lam < 0:
                out.append((w, lam, a))
    return out


def filtered_darboux(terms, A, order=None):
    """Darboux normalization over the Novikov ring.  terms maps 2-form words
    to coefficients.  A term of negative energy and positive length is an
    obstruction: every filtered isomorphism preserves the minimal negative
    exponent of the non-constant part, so no normalization exists."""
    A = as_filtered(A)
    order = order or A.order
    negative = _negative_terms(terms)
    if negative:
        tau = min(lam for _, lam, _ in negative)
        moving = [(w, lam, a) for w, lam, a in negative if len(w) > 2]
        if moving:
            w, lam, a = min(moving, key=lambda t: (t[1], len(t[0]), t[0]))
            report = {"offending_term": {"word": list(w), "energy": lam, "coefficient": a},
                      "minimal_negative_exponent": tau,
                      "invariant": "filtered isomorphisms preserve the minimal negative "
                                   "exponent of the non-constant part"}
            raise Obstruction("a term of negative energy and positive length cannot be "
                              "removed by a filtered isomorphism", report)
        raise PreconditionError("the constant part has negative energy; it is not a "
                                "constant 2-form over the ground field")
    space = A.space(order)
    omega_full = CyclicForm(space, {w: _novikov(c, A.cutoff) for w, c in terms.items()})
    return sympeq.darboux(omega_full)


def _novikov(c, cutoff):
    if isinstance(c, NovikovScalar):
        return NovikovScalar(c.terms, cutoff)
    return NovikovScalar({0: c}, cutoff) if c else c


# ------------------------------------------------------------------ bimodule maps

def weakly_filtered_check(psi, A, order=None):
    """Minimal energy constant c >= 0 with val(psi(e)) >= -c on every entry,
    together with the bimodule equation at order N."""
    A = as_filtered(A)
    order = order or A.order
    entries = getattr(psi, "entries", psi)
    drop = Fraction(0)
    worst = None
    for e, c in entries.items():
        if not c:
            continue
        d = -valuation(c)
        if d > drop:
            drop, worst = d, e
    defect = bimodule_defect_ordered(A.base, entries, order)
    witness = None
    if defect:
        k = min(defect, key=lambda e: (len(e[0]) + len(e[2]), e))
        witness = {"entry": k, "value": defect[k]}
    return {"c": drop, "worst_entry": worst, "bimodule": not defect, "witness": witness,
            "skew": not skew_defect(entries, A.deg), "pass": not defect}


# ------------------------------------------------------------------ equivalence

def filtered_equivalence(A, omega, eta, order=None, check_cyclic=True):
    """The equivalence loop with order 2j + n in place of word length."""
    A = as_filtered(A)
    order = order or A.order
    entries = getattr(eta, "entries", eta)
    negative = _negative_terms(entries)
    if negative:
        raise PreconditionError("eta has a term of negative energy (T^%s); the equivalence "
                                "needs eta with non-negative energy only"
                                % (min(lam for _, lam, _ in negative),))
    if not A.is_canonical():
        raise PreconditionError("the filtered structure is not canonical: m_{0,0} or "
                                "m_{1,0} is nonzero")
    eta = {k: _novikov(c, A.cutoff) for k, c in entries.items() if c}
    return sympeq._equivalence(A.base, omega, eta, A.space(order), check_cyclic,
                               filtered=True)


# ------------------------------------------------------------------ serialization

def scalar_to_json(c):
    """Rationals as "p/q"; energy-carrying scalars as [{"T": lam, "c": coeff}]."""
    if isinstance(c, NovikovScalar):
        if c.is_constant():
            return str(c.constant_part())
        return [{"T": str(lam), "c": str(a)} for lam, a in sorted(c.terms.items())]
    return str(_q(c))


def scalar_from_json(x, cutoff=None):
    if isinstance(x, list):
        terms = {}
        for t in x:
            if set(t) != {"T", "c"}:
                raise MalformedInput("energy terms need exactly the keys T and c")
            lam = parse_rational(t["T"])
            terms[lam] = terms.get(lam, 0) + parse_rational(t["c"])
        s = NovikovScalar(terms, cutoff)
        return s.constant_part() if s.is_constant() else s
    return parse_rational(x)


def parse_rational(x):
    try:
        return as_rational(x)
    except (TypeError, ValueError, ZeroDivisionError):
        raise MalformedInput("expected a rational like \"p/q\", got %r" % (x,))


def random_scalar(r, energies, cutoff, terms=2):
    """Random nonzero scalar with exponents drawn from energies."""
    out = NovikovScalar({}, cutoff)
    while not out:
        out = NovikovScalar({r.choice(energies): Fraction(r.randint(-5, 5), r.randint(1, 3))
                             for _ in range(terms)}, cutoff)
    return out


__all__ = ["NovikovScalar", "GappedMonoid", "NovikovFormSpace", "FilteredAInfty",
           "quantum_sphere", "gapped_validate", "order", "filtered_ainfty_defect",
           "filtered_cyclicity", "filtered_darboux", "weakly_filtered_check",
           "filtered_equivalence", "filtered_homomorphism_defect", "scalar_to_json",
           "scalar_from_json", "valuation"]
