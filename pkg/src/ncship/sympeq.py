"""Symplectic side: cyclic inner products as constant 2-forms, the
contraction solver, exponentials of vector fields, Darboux normalization and
the equivalence automorphism between two strong homotopy inner products."""

from fractions import Fraction
from math import factorial

from .barcx import Cohomomorphism, compose_cohomomorphisms
from .errors import InvariantViolation, MalformedInput, PreconditionError
from .hochcyc import closedness_defect, gram_matrix, skew_defect
from .linalg import Echelon, Inconsistent, matrix_rank
from .ncgeom import (LETTER_X, CyclicForm, FormalVectorField, FormSpace, bimodmap_from_twoform,
                     contract, d_cyc, exp_lie, exp_series_coefficient, lie_derivative,
                     oneform_from_cochain, poincare_H, pullback_by_cohom, q_from_structure,
                     twoform_from_bimodmap, vf_bracket)
from .signcore import sign
from .sparse import add_term, all_words


class ConstantTwoForm:
    """omega = sum omega_ab (dx_a dx_b)_c with omega_ab = <e_a, e_b>."""

    def __init__(self, matrix, degrees):
        self.matrix = [[c for c in row] for row in matrix]
        self.deg = list(degrees)
        n = len(self.deg)
        if len(self.matrix) != n or any(len(r) != n for r in self.matrix):
            raise MalformedInput("pairing matrix must be %d x %d" % (n, n))

    @property
    def dim(self):
        return len(self.deg)

    def skew_violations(self):
        """Pairs with <a,b> != -(-1)^{|a|'|b|'} <b,a>."""
        bad = []
        for a in range(self.dim):
            for b in range(self.dim):
                want = -sign(self.deg[a] * self.deg[b]) * self.matrix[b][a]
                if self.matrix[a][b] != want:
                    bad.append((a, b))
        return bad

    def is_nondegenerate(self):
        return matrix_rank(self.matrix) == self.dim

    def form(self, space):
        out = CyclicForm(space)
        for a in range(self.dim):
            for b in range(self.dim):
                if self.matrix[a][b]:
                    out._add((a, b), self.matrix[a][b])
        return out

    @classmethod
    def from_form(cls, form):
        """Constant part of a 2-form, read back as a skew matrix."""
        space = form.space
        n = space.dim
        m = [[0] * n for _ in range(n)]
        for w, c in form.terms.items():
            if len(w) == 2 and w[0] < LETTER_X and w[1] < LETTER_X:
                a, b = w
                if a == b:
                    m[a][a] = c
                else:
                    half = Fraction(1, 2) * c
                    m[a][b] = half
                    m[b][a] = -sign(space.deg[a] * space.deg[b]) * half
        return cls(m, space.deg)


# ------------------------------------------------------------------ cyclicity

def cyclicity_defect(A, omega, order=None):
    """Two independent routes: the cyclic-symmetry equation on all index
    tuples, and L_Q omega.  Returns both witness sets and whether their
    verdicts agree."""
    order = order or A.order
    mat = omega.matrix if isinstance(omega, ConstantTwoForm) else omega
    deg = A.deg
    eq_defect = {}
    arities = sorted({len(k) for k in A.ops})

    def pairing_of(inputs, last):
        total = 0
        for j, c in A.op(inputs).items():
            if mat[j][last]:
                total = total + c * mat[j][last]
        return total

    for k in arities:
        if k + 1 > order:
            continue
        for xs in all_words(A.dim, k + 1, k + 1):
            lhs = pairing_of(xs[:-1], xs[-1])
            rhs = pairing_of(xs[1:], xs[0])
            K = deg[xs[0]] * sum(deg[x] for x in xs[1:])
            diff = lhs - (rhs if sign(K) > 0 else -rhs)
            if diff:
                eq_defect[xs] = diff
    space = FormSpace(A.deg, order)
    w = ConstantTwoForm(mat, A.deg).form(space)
    lq = lie_derivative(q_from_structure(A, space), w)
    return {"equation": eq_defect, "lie_derivative": dict(lq.terms),
            "agree": (not eq_defect) == (not lq.terms),
            "pass": not eq_defect and not lq.terms}


def ship_check(psi, A, order=None):
    """Skew symmetry, closedness (three-term identity and d omega = 0) and
    homological non-degeneracy via the Gram matrix of psi_{0,0}."""
    order = order or A.order
    if not A.is_minimal():
        raise PreconditionError("non-degeneracy reduces to a Gram matrix only for minimal "
                                "algebras; minimal-model transfer is not provided")
    entries = getattr(psi, "entries", psi)
    skew = skew_defect(entries, A.deg)
    closed_terms = closedness_defect(entries, A.deg, order)
    space = FormSpace(A.deg, order)
    closed_form = False
    if not skew:
        closed_form = not d_cyc(twoform_from_bimodmap(entries, space))
    gram = gram_matrix(entries, A.dim)
    nondeg = matrix_rank(gram) == A.dim
    return {"skew": not skew, "skew_witness": next(iter(skew), None),
            "closed": not closed_terms, "closed_form_route": closed_form,
            "closed_routes_agree": skew == {} and (not closed_terms) == closed_form,
            "nondegenerate": nondeg, "gram": gram,
            "pass": not skew and not closed_terms and nondeg}


# ------------------------------------------------------------------ solvers

def _oneform_columns(omega_form, dim, length):
    """Contractions of omega against the unit fields x_J d/dx_i, |J| = length."""
    space = omega_form.space
    cols = {}
    for J in all_words(dim, length, length):
        word = tuple(LETTER_X + j for j in J)
        for i in range(dim):
            v = FormalVectorField(space, {i: {word: 1}})
            cols[(i, word)] = contract(v, omega_form).terms
    return cols


def solve_contraction(omega, beta):
    """Vector field v with i_v omega = beta, solved length by length and
    verified by recomputation."""
    space = beta.space
    omega_form = omega.form(space) if isinstance(omega, ConstantTwoForm) else omega
    if isinstance(omega, ConstantTwoForm) and not omega.is_nondegenerate():
        raise PreconditionError("the constant 2-form is degenerate; i_v omega = beta has no "
                                "solution in general")
    for w in beta.terms:
        if sum(1 for a in w if a < LETTER_X) != 1:
            raise MalformedInput("beta must be a 1-form")
    by_len = {}
    for w, c in beta.terms.items():
        by_len.setdefault(len(w) - 1, {})[w] = c
    comps = {}
    for length, rhs in sorted(by_len.items()):
        cols = _oneform_columns(omega_form, space.dim, length)
        unknowns = sorted(cols)
        rows = {}
        for n, u in enumerate(unknowns):
            for w, c in cols[u].items():
                rows.setdefault(w, {})[n] = c
        ech = Echelon()
        try:
            for w in sorted(set(rows) | set(rhs)):
                ech.add(rows.get(w, {}), rhs.get(w, 0))
        except Inconsistent:
            raise PreconditionError("i_v omega = beta has no solution at length %d" % length)
        for n, c in ech.back_substitute().items():
            i, word = unknowns[n]
            add_term(comps.setdefault(i, {}), word, c)
    v = FormalVectorField(space, comps)
    if contract(v, omega_form) != beta:
        raise InvariantViolation("contraction solve failed to reproduce beta")
    return v


def coderivation_extend(v, word, parity):
    """v-hat on one bar word; v is given by its components as operations
    e_J -> sum_i v_i^J e_i."""
    out = {}
    ops = _field_ops(v)
    n = len(word)
    deg = v.space.deg
    for k in sorted({len(J) for J in ops}):
        for i in range(n - k + 1):
            vec = ops.get(word[i:i + k])
            if not vec:
                continue
            s = sign(parity * sum(deg[a] for a in word[:i]))
            for j, c in vec.items():
                add_term(out, word[:i] + (j,) + word[i + k:], c if s > 0 else -c)
    return out


def _field_ops(v):
    ops = getattr(v, "_ops_cache", None)
    if ops is None:
        ops = {}
        for i, w, c in v.terms():
            J = tuple(a - LETTER_X for a in w)
            ops.setdefault(J, {})[i] = c
        v._ops_cache = ops
    return ops


def exp_coderivation(v, order=None, filtered=False):
    """f = pi o e^{v-hat}; v must strictly shorten words."""
    space = v.space
    order = order or space.order
    mo = v.min_order()
    if mo is not None and mo < 2:
        raise PreconditionError("exp_coderivation needs a vector field of order >= 2")
    if not filtered and any(len(w) < 2 for _, w, _ in v.terms()):
        raise PreconditionError("exp_coderivation needs components of length >= 2")
    parity = v.parity()
    comps = {}
    for w in all_words(space.dim, order, 1):
        term = {w: 1}
        vec = {}
        n = 0
        while term:
            for ww, c in term.items():
                if len(ww) == 1:
                    add_term(vec, ww[0], c * Fraction(1, factorial(n)))
            nxt = {}
            for ww, c in term.items():
                for w2, c2 in coderivation_extend(v, ww, parity).items():
                    add_term(nxt, w2, space.keep(w, c * c2))
            term = nxt
            n += 1
        if vec:
            comps[w] = vec
    return Cohomomorphism(comps, space.dim, order, filtered)


def cohomomorphism_property_defect(f, v, order=None):
    """f-hat against e^{v-hat} on every word: the comultiplicative
    extension of f must equal the full exponential series."""
    from .barcx import cohom_extend
    space = v.space
    order = order or space.order
    parity = v.parity()
    bad = {}
    for w in all_words(space.dim, order, 1):
        total = {}
        term = {w: 1}
        n = 0
        while term:
            for ww, c in term.items():
                add_term(total, ww, c * Fraction(1, factorial(n)))
            nxt = {}
            for ww, c in term.items():
                for w2, c2 in coderivation_extend(v, ww, parity).items():
                    add_term(nxt, w2, c * c2)
            term = nxt
            n += 1
        ext = cohom_extend(f, w, order)
        for k, c in ext.items():
            add_term(total, k, -c)
        if total:
            bad[w] = total
    return bad


def shift_cohomomorphism(f_field, order):
    """x -> x + f as a cohomomorphism (identity plus the components of f)."""
    space = f_field.space
    comps = {(i,): {i: Fraction(1)} for i in range(space.dim)}
    for i, w, c in f_field.terms():
        J = tuple(a - LETTER_X for a in w)
        add_term(comps.setdefault(J, {}), i, c)
    return Cohomomorphism(comps, space.dim, order, True)


def _parts_by_order(form):
    parts = {}
    for w, c in form.terms.items():
        for o, part in form.space.split(w, c).items():
            parts.setdefault(o, {})[w] = part
    return parts


def darboux(omega_full, nondegeneracy_check=True):
    """Coordinate change F with pullback(F, omega_full) equal to the constant
    part of omega_full; returns (F, ConstantTwoForm)."""
    space = omega_full.space
    if any(sum(1 for a in w if a < LETTER_X) != 2 for w in omega_full.terms):
        raise MalformedInput("darboux expects a 2-form")
    if d_cyc(omega_full):
        raise PreconditionError("the 2-form is not closed")
    const = ConstantTwoForm.from_form(CyclicForm(space, {
        w: space.energy_free(c) for w, c in omega_full.terms.items() if len(w) == 2}))
    if nondegeneracy_check and not const.is_nondegenerate():
        raise PreconditionError("the constant part is degenerate")
    omega0 = const.form(space)
    pars = {space.word_par(w) for w in omega_full.terms}
    if len(pars) > 1:
        raise PreconditionError("the 2-form mixes parities; a parity-preserving coordinate "
                                "change cannot normalize it")
    F = Cohomomorphism.identity(space.dim, space.order)
    current = omega_full
    steps = []
    for _ in range(2 * space.order + 2):
        rest = current - omega0
        if not rest:
            break
        level = rest.min_order()
        piece = CyclicForm(space, _parts_by_order(rest)[level])
        alpha = poincare_H(piece)
        f = solve_contraction(omega0, -alpha)
        step = shift_cohomomorphism(f, space.order)
        current = pullback_by_cohom(step, current)
        F = compose_cohomomorphisms(F, step, space.order)
        after = current - omega0
        if after and after.min_order() <= level:
            raise InvariantViolation("darboux step did not raise the order")
        steps.append(level)
    else:
        raise InvariantViolation("darboux did not terminate within 2N steps")
    if pullback_by_cohom(F, omega_full) != omega0:
        raise InvariantViolation("recomputed pullback differs from the constant part")
    return F, const


class EquivalenceCertificate:
    def __init__(self, automorphism, residual, steps, checks=None):
        self.automorphism = automorphism
        self.residual = residual
        self.steps = steps
        self.checks = checks or {}

    @property
    def ok(self):
        return not self.residual and all(self.checks.values())


def equivalence_automorphism(A, omega, eta, order=None, check_cyclic=True):
    """Automorphism F with F^*(omega + d L_Q alpha_eta) = omega, built from
    repeated exponentials e^{v} with i_v omega = -L_Q alpha."""
    order = order or A.order
    if not A.is_minimal():
        raise PreconditionError("equivalence needs a minimal algebra (m_1 = 0)")
    space = FormSpace(A.deg, order)
    return _equivalence(A, omega, eta, space, check_cyclic)


def _equivalence(A, omega, eta, space, check_cyclic, filtered=False):
    order = space.order
    if not isinstance(omega, ConstantTwoForm):
        omega = ConstantTwoForm(omega, A.deg)
    if check_cyclic and not cyclicity_defect(A, omega, order)["pass"]:
        raise PreconditionError("omega is not a cyclic inner product for the algebra")
    if not omega.is_nondegenerate():
        raise PreconditionError("omega is degenerate")
    Q = q_from_structure(A, space)
    w0 = omega.form(space)
    alpha = oneform_from_cochain(eta, space)
    perturbation = d_cyc(lie_derivative(Q, alpha))
    if any(len(w) == 2 and space.energy_free(c) for w, c in perturbation.terms.items()):
        raise PreconditionError("the perturbation has a constant part; the algebra is not "
                                "minimal")
    target = w0 + perturbation
    F = Cohomomorphism.identity(space.dim, order)
    current = target
    steps = []
    routes_agree = True
    brackets_vanish = True
    last = None
    for _ in range(2 * order + 1):
        beta = lie_derivative(Q, alpha)
        if not beta:
            break
        lvl = beta.min_order()
        if last is not None and lvl <= last:
            raise InvariantViolation("equivalence step did not raise the order")
        last = lvl
        v = solve_contraction(omega, -beta)
        # filtered structures are only Z/2-graded, so parity is all we can ask
        if v.parity() != 0 or (not filtered and any(
                _field_degree(space, i, w) != 0 for i, w, _ in v.terms())):
            raise PreconditionError("eta is not admissible: the vector field solving "
                                    "i_v omega = -L_Q alpha is not of degree 0")
        if any(not w for _, w, _ in v.terms()):
            raise PreconditionError("the vector field has a constant component; its "
                                    "exponential is not defined")
        if vf_bracket(Q, v):
            brackets_vanish = False
        step = exp_coderivation(v, order, filtered)
        via_sub = pullback_by_cohom(step, current)
        via_exp = exp_lie(v, current)
        if via_sub != via_exp:
            routes_agree = False
        current = via_sub
        F = compose_cohomomorphisms(F, step, order)
        steps.append({"order": lvl, "field": v})
        new_alpha = CyclicForm(space)
        term = alpha
        k = 1
        while True:
            term = lie_derivative(v, term)
            if not term:
                break
            new_alpha = new_alpha + exp_series_coefficient(k) * term
            k += 1
        alpha = new_alpha
        if current != w0 + d_cyc(lie_derivative(Q, alpha)):
            raise InvariantViolation("updated primitive does not describe the pulled-back form")
    else:
        raise InvariantViolation("equivalence did not terminate within 2N steps")
    residual = pullback_by_cohom(F, target) - w0
    checks = {"routes_agree": routes_agree, "brackets_vanish": brackets_vanish}
    return EquivalenceCertificate(F, residual, steps, checks)


def _field_degree(space, i, word):
    """Shifted degree of x_J d/dx_i: -sum |e_J|' + |e_i|'."""
    return space.deg[i] - sum(space.deg[a - LETTER_X] for a in word)


def diagram_check(F, phi, phi_prime, space):
    """phi = F^* phi' as bimodule maps, compared through the 2-forms they
    determine (the form of phi' pulled back along F)."""
    w_prime = twoform_from_bimodmap(phi_prime, space)
    pulled = bimodmap_from_twoform(pullback_by_cohom(F, w_prime))
    phi = getattr(phi, "entries", phi)
    diff = dict(pulled)
    for k, c in phi.items():
        add_term(diff, k, -c)
    witness = None
    if diff:
        k = min(diff, key=lambda e: (len(e[0]) + len(e[2]), e))
        witness = {"entry": k, "arity": len(k[0]) + len(k[2]) + 1, "difference": diff[k]}
    return {"pass": not diff, "witness": witness}


def cyclic_homomorphism_check(h, pair_a, pair_b, order=None):
    """Cyclic homomorphism conditions: h_1 preserves the pairing and
    sum_{i+j=k} <h_i(x_1..x_i), h_j(x_{i+1}..x_k)> = 0 for k >= 3."""
    order = order or h.order
    ma = pair_a.matrix if isinstance(pair_a, ConstantTwoForm) else pair_a
    mb = pair_b.matrix if isinstance(pair_b, ConstantTwoForm) else pair_b
    dim = h.dim
    bad1 = []
    for a in range(dim):
        for b in range(dim):
            val = 0
            for p, cp in h.component((a,)).items():
                for q, cq in h.component((b,)).items():
                    if mb[p][q]:
                        val = val + cp * cq * mb[p][q]
            if val != ma[a][b]:
                bad1.append((a, b))
    bad2 = {}
    for w in all_words(dim, order, 3):
        total = 0
        for i in range(1, len(w)):
            for p, cp in h.component(w[:i]).items():
                for q, cq in h.component(w[i:]).items():
                    if mb[p][q]:
                        total = total + cp * cq * mb[p][q]
        if total:
            bad2[w] = total
    return {"preserves_pairing": not bad1, "pairing_witness": bad1[:1],
            "higher_vanish": not bad2, "higher_witness": next(iter(bad2), None),
            "pass": not bad1 and not bad2}
