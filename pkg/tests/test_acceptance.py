"""The twelve acceptance criteria, each timed against its budget.  The
terminal summary prints one PASS/FAIL line per criterion."""

import copy
import json
import random
import time
from contextlib import contextmanager
from fractions import Fraction
from pathlib import Path

import pytest

from ncship import fixtures, hochcyc as H, novikov as N, randgen as R
from ncship.barcx import ainfty_defect, homomorphism_defect, unit_check
from ncship.cli import main
from ncship.errors import Obstruction, PreconditionError
from ncship.ncgeom import (LETTER_X, FormSpace, bimodmap_from_twoform, contract, d_cyc,
                           exp_lie, lie_derivative, oneform_from_cochain, poincare_H,
                           pullback_by_cohom, q_from_structure, twoform_from_bimodmap,
                           vf_bracket)
from ncship.sparse import add_term
from ncship.sympeq import (ConstantTwoForm, cohomomorphism_property_defect, cyclicity_defect,
                           darboux, diagram_check, equivalence_automorphism,
                           exp_coderivation)
from ncship.signcore import sign

X = LETTER_X
FIX = Path(__file__).resolve().parent.parent / "fixtures"


@contextmanager
def criterion(record, number, title, budget):
    start = time.perf_counter()
    passed = False
    try:
        yield
        passed = True
    finally:
        secs = time.perf_counter() - start
        record(number, title, passed and secs < budget, secs)
    assert secs < budget, "criterion %d took %.1fs (budget %ds)" % (number, secs, budget)


def unfiltered(order):
    return [(fixtures.sphere(order), fixtures.sphere_pairing()),
            (fixtures.cp2(order), fixtures.cp2_pairing())]


def _sum(a, b, s=1):
    out = dict(a)
    for k, c in b.items():
        add_term(out, k, s * c)
    return out


# ---------------------------------------------------------------- 1

def test_criterion_01_structural_identities(record_criterion):
    with criterion(record_criterion, 1, "structural identities on S2, CP2, QS2 at N=8", 10):
        for A, P in unfiltered(8):
            assert not ainfty_defect(A, 8)
            assert unit_check(A) == []
            res = cyclicity_defect(A, P, 8)
            assert not res["equation"] and not res["lie_derivative"]
        Q = fixtures.quantum_sphere(8, 4)
        assert N.gapped_validate(Q.monoid, Q)["pass"]
        assert not N.filtered_ainfty_defect(Q, 8)
        assert unit_check(Q.base) == []
        res = N.filtered_cyclicity(Q, fixtures.sphere_pairing(), 8)
        assert not res["per_beta"] and not res["lie_derivative"]


# ---------------------------------------------------------------- 2

def _break(r, A):
    """Shift one binary operation coefficient, existing or new."""
    ops = {k: dict(v) for k, v in A.ops.items()}
    key = (r.randrange(A.dim), r.randrange(A.dim))
    vec = ops.setdefault(key, {})
    # keep the operation odd so both pictures describe a degree-one structure
    want = (A.deg[key[0]] + A.deg[key[1]] + 1) & 1
    j = r.choice([i for i in range(A.dim) if A.deg[i] & 1 == want])
    vec[j] = vec.get(j, 0) + R.coeff(r)
    return A.with_ops({k: v for k, v in ops.items() if any(v.values())}, check_degrees=False)


def test_criterion_02_dual_picture(record_criterion):
    bases = [fixtures.sphere(6), fixtures.cp2(6), fixtures.truncated_polynomial(1, 1, 6),
             fixtures.truncated_polynomial(2, 1, 6)]
    with criterion(record_criterion, 2, "ainfty_defect empty iff [Q,Q]=0, 50 structures", 60):
        r = random.Random(2)
        verdicts = []
        for n in range(50):
            A = R.conjugated_structure(r, bases[n % len(bases)], 6, 2)
            if n % 2:
                A = _break(r, A)
            Q = q_from_structure(A, FormSpace(A.deg, 6))
            left, right = not ainfty_defect(A, 6), not vf_bracket(Q, Q)
            assert left == right, "verdicts disagree on structure %d" % n
            verdicts.append(left)
        assert verdicts.count(True) >= 25 and verdicts.count(False) >= 10


# ---------------------------------------------------------------- 3, 4

SPACES = [FormSpace([-1, 1], 6), FormSpace([-1, 1, 3], 6), FormSpace([-1, 0, 1], 6)]


def _commutator(f, g, p, q, w):
    s = sign(p[0] * q[0] + p[1] * q[1])
    return f(g(w)) - s * g(f(w))


def test_criterion_03_cartan(record_criterion):
    with criterion(record_criterion, 3, "Cartan identities on 200 cases", 60):
        for n in range(200):
            r = R.rng(n)
            sp = SPACES[n % 3]
            w = R.form(r, sp, 3, 1, 4)
            xi = R.field(r, sp, 2, 1, 2, parity=r.randint(0, 1))
            eta = R.field(r, sp, 2, 1, 2, parity=r.randint(0, 1))
            p, q = xi.parity(), eta.parity()
            br = vf_bracket(xi, eta)
            L = lambda v: lambda a: lie_derivative(v, a)  # noqa: E731
            i = lambda v: lambda a: contract(v, a)  # noqa: E731
            assert not d_cyc(d_cyc(w))
            assert lie_derivative(xi, w) == d_cyc(contract(xi, w)) + contract(xi, d_cyc(w))
            assert _commutator(L(xi), i(eta), (p, 0), (q, 1), w) == contract(br, w)
            assert _commutator(L(xi), L(eta), (p, 0), (q, 0), w) == lie_derivative(br, w)
            assert not _commutator(i(xi), i(eta), (p, 1), (q, 1), w)


def test_criterion_04_poincare(record_criterion):
    with criterion(record_criterion, 4, "dH + Hd = Id on 200 forms", 30):
        for n in range(200):
            r = R.rng(10_000 + n)
            w = R.form(r, SPACES[n % 3], 4, 1, 6)
            assert d_cyc(poincare_H(w)) + poincare_H(d_cyc(w)) == w


# ---------------------------------------------------------------- 5, 6

def bicomplex_fixtures(order):
    return [fixtures.sphere(order), fixtures.cp2(order), fixtures.quantum_sphere(order, 4).base]


def test_criterion_05_bicomplex(record_criterion):
    with criterion(record_criterion, 5, "b, b*, B* identities and adjunction, 200 per fixture",
                   60):
        for A in bicomplex_fixtures(5):
            r = random.Random(5)
            for _ in range(200):
                assert not H.b_chain(A, H.b_chain(A, R.chain(r, A, 2, 4)))
                f = R.cochain(r, A, 3, 3)
                assert not H.bstar(A, H.bstar(A, f))
                assert {k: c for k, c in H.bstar(A, f).items() if len(k[0]) <= 3} == \
                    H.bstar_oracle(A, f, 3)
                g = R.cochain(r, A, 3, 3, reduced=True)
                assert not H.Bstar(A, H.Bstar(A, g))
                anti = _sum(H.bstar(A, H.Bstar(A, g)), H.Bstar(A, H.bstar(A, g)))
                # exact on arities where neither side was truncated
                assert not {k: c for k, c in anti.items() if len(k[0]) <= A.order - 2}


def test_criterion_06_correspondence(record_criterion):
    with criterion(record_criterion, 6, "cochain/form correspondence, 50 per fixture", 30):
        for A in bicomplex_fixtures(6):
            sp = FormSpace.of(A)
            Q = q_from_structure(A, sp)
            r = random.Random(6)
            for _ in range(50):
                eta = R.cochain(r, A, 4, 4)
                alpha = oneform_from_cochain(eta, sp)
                assert oneform_from_cochain(H.bstar(A, eta), sp) == lie_derivative(Q, alpha)
                assert twoform_from_bimodmap(H.tilde(A, eta), sp) == d_cyc(alpha)


# ---------------------------------------------------------------- 7, 8

SOLVER_ORDER = 6


_COCYCLES = []


def solver_cocycles():
    """50 cocycles per unfiltered fixture, drawn across every degree with a
    nonzero solution space; generated once, inside the first timed block."""
    if _COCYCLES:
        return _COCYCLES
    for A, _ in unfiltered(SOLVER_ORDER):
        r, cache = random.Random(7), {}
        degrees = [d for d in range(-3, 9) if H.cocycle_space(A, 3, SOLVER_ORDER, d)]
        got = []
        n = 0
        while len(got) < 50:
            phi = H.random_cocycle(A, r, 3, SOLVER_ORDER, degrees[n % len(degrees)], cache)
            n += 1
            if any(phi.columns):
                got.append(phi)
        _COCYCLES.append((A, got))
    return _COCYCLES


def test_criterion_07_tilde(record_criterion):
    with criterion(record_criterion, 7, "tilde of cocycles is a bimodule map; B* image; "
                   "skew and closed", 120):
        for A, cocycles in solver_cocycles():
            for phi in cocycles:
                assert H.validate_negative_cocycle(A, phi)["valid"]
                psi = H.tilde(A, phi)
                assert not H.bimodule_defect(A, psi)
                assert not H.bimodule_defect_ordered(A, psi)
        r = random.Random(71)
        for n in range(100):
            A = bicomplex_fixtures(5)[n % 3]
            gamma = R.cochain(r, A, 3, 4, reduced=True)
            assert not H.tilde(A, H.Bstar(A, gamma))
        for n in range(100):
            A = bicomplex_fixtures(5)[n % 3]
            psi = H.tilde(A, R.cochain(r, A, 4, 3))
            assert not H.skew_defect(psi, A.deg)
            assert not H.closedness_defect(psi, A.deg, 4)


def test_criterion_08_trace(record_criterion):
    with criterion(record_criterion, 8, "trace of m2 equals tilde pairing on all cocycles", 30):
        checked = 0
        for A, cocycles in solver_cocycles():
            for phi in cocycles:
                assert H.trace_compare(A, phi)["pass"]
                checked += 1
        assert checked == 100


# ---------------------------------------------------------------- 9

def test_criterion_09_automorphisms(record_criterion):
    with criterion(record_criterion, 9, "exponential cohomomorphisms and pullback routes", 120):
        made = 0
        r = random.Random(9)
        while made < 20:
            A = fixtures.sphere(6) if made % 2 else fixtures.cp2(6)
            sp = FormSpace.of(A)
            Q = q_from_structure(A, sp)
            w = R.field(r, sp, 2, 2, 3, parity=1)
            v = vf_bracket(Q, w)
            if not v:
                continue
            assert not vf_bracket(Q, v)
            f = exp_coderivation(v, 6)
            assert not cohomomorphism_property_defect(f, v, 6)
            assert not homomorphism_defect(f, A, A, 6)
            made += 1
        for n in range(50):
            sp = SPACES[n % 3]
            v = R.field(r, FormSpace(sp.deg, 5), 2, 2, 3, parity=0)
            form = R.form(r, v.space, 3, 1, 4)
            assert pullback_by_cohom(exp_coderivation(v), form) == exp_lie(v, form)


# ---------------------------------------------------------------- 10

def run_cli(capsys, *args):
    with pytest.raises(SystemExit) as exc:
        main([str(a) for a in args])
    return exc.value.code, capsys.readouterr().out


def test_criterion_10_darboux(record_criterion, capsys):
    with criterion(record_criterion, 10, "Darboux normalization of 50 forms; negative "
                   "energy rejected", 120):
        done = 0
        for A, P in unfiltered(6):
            sp = FormSpace.of(A)
            w0 = ConstantTwoForm(P, A.deg).form(sp)
            for seed in range(20 if A.dim == 2 else 15):
                full = w0 + R.exact_twoform(R.rng(seed), sp, sp.word_par(next(iter(w0.terms))))
                assert full != w0
                F, const = darboux(full)
                assert pullback_by_cohom(F, full) == const.form(sp) == w0
                done += 1
        Q = fixtures.quantum_sphere(6, 4)
        sp = Q.space()
        w0 = ConstantTwoForm(fixtures.sphere_pairing(), Q.deg).form(sp)
        energies = Q.monoid.energies()[:2]
        for seed in range(15):
            pert = R.exact_twoform(R.rng(seed), sp, sp.word_par((0, 1)), 3, 4, 4,
                                   scalar=lambda r: N.random_scalar(r, energies, 4))
            full = w0 + pert
            F, const = N.filtered_darboux(dict(full.terms), Q)
            assert pullback_by_cohom(F, full) == w0
            done += 1
        assert done == 50
        terms = {(0, 1): Fraction(2), (X + 0, 0, X + 1, 1): N.NovikovScalar.T(-1, 4)}
        before = copy.deepcopy(terms)
        with pytest.raises(Obstruction) as exc:
            N.filtered_darboux(terms, Q)
        assert exc.value.exit_code == 3 and terms == before
        path = FIX / "qs2_form_negative.json"
        raw = path.read_bytes()
        code, out = run_cli(capsys, "darboux", path, "--order", 6)
        assert code == 3 and json.loads(out)["verdict"] == "obstruction"
        assert path.read_bytes() == raw


# ---------------------------------------------------------------- 11

def _pairing_degree(P, deg):
    return next(deg[a] + deg[b] for a, row in enumerate(P) for b, c in enumerate(row) if c)


def test_criterion_11_equivalence(record_criterion):
    with criterion(record_criterion, 11, "equivalence certificates on S2, CP2, QS2", 300):
        r = random.Random(11)
        for A, P in unfiltered(6):
            omega = ConstantTwoForm(P, A.deg)
            sp = FormSpace.of(A)
            Q = q_from_structure(A, sp)
            total = _pairing_degree(P, A.deg) + 1
            made = 0
            while made < 10:
                eta = R.cochain(r, A, 3, 4, 1, total=total)
                alpha = oneform_from_cochain(eta, sp)
                if not lie_derivative(Q, alpha):
                    continue
                cert = equivalence_automorphism(A, omega, eta)
                assert cert.ok and not cert.residual and cert.steps
                assert not homomorphism_defect(cert.automorphism, A, A, 6)
                moved = omega.form(sp) + d_cyc(lie_derivative(Q, alpha))
                assert diagram_check(cert.automorphism, bimodmap_from_twoform(omega.form(sp)),
                                     bimodmap_from_twoform(moved), sp)["pass"]
                made += 1
        QS = fixtures.quantum_sphere(6, 4)
        omega = ConstantTwoForm(fixtures.sphere_pairing(), QS.deg)
        sp = QS.space()
        Q = q_from_structure(QS.base, sp)
        made = 0
        while made < 10:
            eta = {}
            while len(eta) < 3:
                a = tuple(r.randrange(2) for _ in range(r.choice((2, 4))))
                eta[(a, r.randrange(2))] = N.NovikovScalar({r.choice((0, 1)): R.coeff(r)}, 4)
            alpha = oneform_from_cochain(eta, sp)
            if not lie_derivative(Q, alpha):
                continue
            cert = N.filtered_equivalence(QS, omega, eta)
            assert cert.ok and not cert.residual
            assert not N.filtered_homomorphism_defect(cert.automorphism, QS)
            moved = omega.form(sp) + d_cyc(lie_derivative(Q, alpha))
            assert diagram_check(cert.automorphism, bimodmap_from_twoform(omega.form(sp)),
                                 bimodmap_from_twoform(moved), sp)["pass"]
            made += 1
        with pytest.raises(PreconditionError):
            N.filtered_equivalence(QS, omega, {((1, 1), 1): N.NovikovScalar.T(-1, 4)})


# ---------------------------------------------------------------- 12

def _with_trivial_monoid(src, dst):
    doc = json.loads(src.read_text())
    doc["monoid"] = {"generators": [["0", 0]]}
    dst.write_text(json.dumps(doc))
    return dst


def test_criterion_12_degeneration(record_criterion, capsys, tmp_path):
    with criterion(record_criterion, 12, "G = {(0,0)} reproduces unfiltered reports "
                   "byte for byte", 30):
        s2 = _with_trivial_monoid(FIX / "s2.json", tmp_path / "s2g.json")
        cp2 = _with_trivial_monoid(FIX / "cp2.json", tmp_path / "cp2g.json")
        forms = [(FIX / n, _with_trivial_monoid(FIX / n, tmp_path / ("g_" + n)))
                 for n in ("s2_form_const.json", "s2_form_perturbed.json")]
        runs = [
            (["check", FIX / "s2.json"], ["check", s2]),
            (["check", FIX / "s2.json"], ["check", FIX / "s2_trivial_monoid.json"]),
            (["check", FIX / "cp2.json"], ["check", cp2]),
            (["tilde", FIX / "s2.json", FIX / "s2_pairing_cocycle.json"],
             ["tilde", s2, FIX / "s2_pairing_cocycle.json"]),
            (["tilde", FIX / "s2.json", FIX / "zero_cocycle.json"],
             ["tilde", s2, FIX / "zero_cocycle.json"]),
            (["tilde", FIX / "cp2.json", "--seed", 4, "--order", 5],
             ["tilde", cp2, "--seed", 4, "--order", 5]),
            (["equivalence", FIX / "s2.json", FIX / "s2_eta.json", "--order", 6],
             ["equivalence", s2, FIX / "s2_eta.json", "--order", 6]),
            (["equivalence", FIX / "s2.json", FIX / "s2_eta_tt.json", "--order", 6],
             ["equivalence", s2, FIX / "s2_eta_tt.json", "--order", 6]),
        ] + [(["darboux", a, "--order", 6], ["darboux", b, "--order", 6]) for a, b in forms]
        for plain, graded in runs:
            out_a, out_b = tmp_path / "a.out", tmp_path / "b.out"
            ca, ra = run_cli(capsys, *plain, "--output", out_a)
            cb, rb = run_cli(capsys, *graded, "--output", out_b)
            assert ca == cb and ra == rb, "reports differ for %s" % plain[0]
            if out_a.exists() or out_b.exists():
                assert out_a.read_bytes() == out_b.read_bytes()
                out_a.unlink()
                out_b.unlink()
