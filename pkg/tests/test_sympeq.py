from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from ncship import fixtures, randgen as R
from ncship.barcx import Cohomomorphism, homomorphism_defect
from ncship.errors import MalformedInput, PreconditionError
from ncship.ncgeom import (LETTER_X, CyclicForm, FormSpace, FormalVectorField,
                           bimodmap_from_twoform, d_cyc, exp_lie, lie_derivative,
                           oneform_from_cochain, pullback_by_cohom, q_from_structure,
                           vf_bracket)
from ncship.sympeq import (ConstantTwoForm, cohomomorphism_property_defect,
                           cyclic_homomorphism_check, cyclicity_defect, darboux,
                           diagram_check, equivalence_automorphism, exp_coderivation,
                           ship_check, solve_contraction)

seeds = st.integers(0, 2 ** 32)
X = LETTER_X
CASES = {
    "sphere": (fixtures.sphere, fixtures.sphere_pairing),
    "cp2": (fixtures.cp2, fixtures.cp2_pairing),
}


def setup(name, order=6):
    make, pairing = CASES[name]
    A = make(order)
    omega = ConstantTwoForm(pairing(), A.deg)
    return A, omega, FormSpace.of(A)


def pairing_degree(omega, space):
    w = next(iter(omega.form(space).terms))
    return sum(space.deg[a % X] for a in w)


def admissible_eta(r, A, omega, space, terms=3):
    return R.cochain(r, A, terms, 4, 1, total=pairing_degree(omega, space) + 1)


def test_fixture_pairings_are_cyclic_inner_products():
    for name in CASES:
        A, omega, _ = setup(name)
        assert not omega.skew_violations()
        assert omega.is_nondegenerate()
        res = cyclicity_defect(A, omega)
        assert res["pass"] and res["agree"]


def test_cyclicity_routes_agree_on_a_broken_product():
    A, omega, _ = setup("sphere")
    broken = A.with_ops(dict(A.ops) | {(1, 1): {1: Fraction(1)}}, check_degrees=False)
    res = cyclicity_defect(broken, omega)
    assert res["equation"] and res["lie_derivative"] and res["agree"]


def test_constant_form_round_trip():
    for name in CASES:
        _, omega, sp = setup(name)
        assert ConstantTwoForm.from_form(omega.form(sp)).matrix == omega.matrix


def test_pairing_matrix_shape_checked():
    with pytest.raises(MalformedInput):
        ConstantTwoForm([[0, 1]], [-1, 1])


@given(seeds)
def test_contraction_solve(seed):
    r = R.rng(seed)
    _, omega, sp = setup("cp2")
    v = R.field(r, sp, 3, 1, 3)
    from ncship.ncgeom import contract
    beta = contract(v, omega.form(sp))
    assert contract(solve_contraction(omega, beta), omega.form(sp)) == beta


def test_contraction_rejects_degenerate_forms():
    sp = FormSpace([-1, 1], 4)
    with pytest.raises(PreconditionError):
        solve_contraction(ConstantTwoForm([[0, 0], [0, 0]], [-1, 1]),
                          CyclicForm(sp, {(0, X + 1): 1}))


@given(seeds)
@settings(max_examples=15)
def test_exponential_is_comultiplicative(seed):
    sp = FormSpace([-1, 1, 1], 4)
    v = R.field(R.rng(seed), sp, 2, 2, 3, parity=0)
    f = exp_coderivation(v)
    assert not cohomomorphism_property_defect(f, v)


@given(seeds)
@settings(max_examples=15)
def test_pullback_routes_agree(seed):
    r = R.rng(seed)
    sp = FormSpace([-1, 1, 3], 5)
    v = R.field(r, sp, 2, 2, 3, parity=0)
    w = R.form(r, sp, 3, 1, 4)
    assert pullback_by_cohom(exp_coderivation(v), w) == exp_lie(v, w)


def test_exponential_of_q_commuting_field_is_automorphism():
    A, _, sp = setup("sphere", 6)
    Q = q_from_structure(A, sp)
    w = FormalVectorField(sp, {1: {(X + 1, X + 1, X + 1): Fraction(1)}})
    v = vf_bracket(Q, w)
    assert not vf_bracket(Q, v)
    if v:
        assert not homomorphism_defect(exp_coderivation(v), A, A)


def test_exponential_needs_order_two():
    sp = FormSpace([-1, 1], 4)
    with pytest.raises(PreconditionError):
        exp_coderivation(FormalVectorField(sp, {0: {(X + 1,): 1}}))


@pytest.mark.parametrize("name", sorted(CASES))
def test_darboux_normalizes(name):
    A, omega, sp = setup(name)
    w0 = omega.form(sp)
    par = sp.word_par(next(iter(w0.terms)))
    for seed in range(3):
        full = w0 + R.exact_twoform(R.rng(seed), sp, par)
        F, const = darboux(full)
        assert const.matrix == omega.matrix
        assert pullback_by_cohom(F, full) == w0


def test_darboux_rejects_open_and_degenerate_forms():
    sp = FormSpace([-1, 1], 4)
    with pytest.raises(PreconditionError):
        darboux(CyclicForm(sp, {(0, 1): 1, (0, X + 1, 1): 1}))
    with pytest.raises(PreconditionError):
        darboux(R.exact_twoform(R.rng(0), sp, 0, min_len=3, max_len=3))
    with pytest.raises(MalformedInput):
        darboux(CyclicForm(sp, {(0, X + 1): 1}))


@pytest.mark.parametrize("name", sorted(CASES))
def test_equivalence_certificates(name):
    A, omega, sp = setup(name)
    Q = q_from_structure(A, sp)
    phi = bimodmap_from_twoform(omega.form(sp))
    for seed in range(3):
        eta = admissible_eta(R.rng(seed), A, omega, sp)
        cert = equivalence_automorphism(A, omega, eta)
        assert cert.ok and not cert.residual
        assert not homomorphism_defect(cert.automorphism, A, A, 6)
        target = omega.form(sp) + d_cyc(lie_derivative(Q, oneform_from_cochain(eta, sp)))
        assert diagram_check(cert.automorphism, phi, bimodmap_from_twoform(target), sp)["pass"]


def test_zero_eta_gives_identity():
    A, omega, _ = setup("sphere")
    cert = equivalence_automorphism(A, omega, {})
    assert cert.ok and not cert.steps
    assert cert.automorphism == Cohomomorphism.identity(2, 6)


def test_odd_eta_is_inadmissible():
    A, omega, _ = setup("sphere")
    with pytest.raises(PreconditionError):
        equivalence_automorphism(A, omega, {((1,), 1): Fraction(1)})


def test_diagram_check_names_a_witness():
    A, omega, sp = setup("sphere")
    phi = bimodmap_from_twoform(omega.form(sp))
    res = diagram_check(Cohomomorphism.identity(2, 6), phi,
                        bimodmap_from_twoform(2 * omega.form(sp)), sp)
    assert not res["pass"]
    assert res["witness"]["arity"] == 1


def test_ship_check_on_pairing():
    A, omega, sp = setup("sphere")
    res = ship_check(bimodmap_from_twoform(omega.form(sp)), A)
    assert res["pass"] and res["closed_routes_agree"]


def test_identity_is_cyclic_and_scaling_is_not():
    _, omega, _ = setup("cp2")
    ident = Cohomomorphism.identity(3, 5)
    res = cyclic_homomorphism_check(ident, omega, omega)
    assert res["preserves_pairing"]
    scaled = Cohomomorphism({(i,): {i: Fraction(2)} for i in range(3)}, 3, 5)
    assert not cyclic_homomorphism_check(scaled, omega, omega)["preserves_pairing"]
