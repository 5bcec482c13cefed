"""Command line front-end: check | tilde | equivalence | darboux.

Exit codes: 0 all checks pass, 1 a check failed, 2 precondition rejected,
3 mathematical obstruction, 4 input error.  Reports are deterministic: the
same input and flags give byte-identical output.
"""

import sys

import click

from . import formats, hochcyc, novikov, sympeq
from .barcx import ainfty_defect, homomorphism_defect, unit_check
from .errors import MalformedInput, NcshipError, Obstruction, PreconditionError
from .ncgeom import (CyclicForm, FormSpace, bimodmap_from_twoform, d_cyc, lie_derivative,
                     oneform_from_cochain, pullback_by_cohom, q_from_structure)
from .randgen import rng

EXIT_INPUT = 4


# ------------------------------------------------------------------ report helpers

def _check(name, ok, witness=None, **extra):
    out = {"name": name, "status": "skipped" if ok is None else ("pass" if ok else "fail"),
           "witness": formats.jsonable(witness)}
    out.update({k: formats.jsonable(v) for k, v in extra.items()})
    return out


def _first(store):
    return min(store, key=lambda k: (len(k), k)) if store else None


def _vec(vec, ids):
    return {ids[j]: c for j, c in sorted(vec.items())}


def _defect_witness(defect, ids):
    """First failing input word and the bar words it produces."""
    w = _first(defect)
    if w is None:
        return None
    terms = sorted(defect[w].items(), key=lambda kv: (len(kv[0]), kv[0]))
    return {"word": [ids[a] for a in w],
            "value": [{"word": [ids[a] for a in k], "c": c} for k, c in terms]}


def _entry(e, ids):
    a, v, b, w = e
    return {"a": [ids[i] for i in a], "v": ids[v], "b": [ids[i] for i in b], "w": ids[w]}


def _report(command, checks, payload=None):
    failed = any(c["status"] == "fail" for c in checks)
    doc = {"schema": formats.SCHEMA_VERSION, "command": command, "checks": checks,
           "verdict": "fail" if failed else "pass", "exit_code": 1 if failed else 0}
    if payload is not None:
        doc["payload"] = formats.jsonable(payload)
    return doc


def _error_report(command, err):
    details = formats.jsonable(err.report) if isinstance(err, Obstruction) else None
    kind = {2: "precondition", 3: "obstruction", 4: "input"}.get(err.exit_code, "failure")
    return {"schema": formats.SCHEMA_VERSION, "command": command, "checks": [],
            "verdict": kind, "exit_code": err.exit_code,
            "error": {"type": type(err).__name__, "message": str(err), "details": details}}


def _text(doc):
    lines = ["ncship %s" % doc["command"]["name"]]
    for c in doc["checks"]:
        lines.append("  %-16s %s" % (c["name"], c["status"]))
        if c["status"] == "fail" and c["witness"] is not None:
            lines.append("    witness: %s" % (formats.json.dumps(c["witness"]),))
    if "error" in doc:
        lines.append("  error: %s" % doc["error"]["message"])
        if doc["error"]["details"]:
            lines.append("    details: %s" % formats.json.dumps(doc["error"]["details"]))
    if "payload" in doc and "gram" in doc["payload"]:
        lines.append("  gram: %s" % formats.json.dumps(doc["payload"]["gram"]))
    lines.append("verdict: %s (exit %d)" % (doc["verdict"], doc["exit_code"]))
    return "\n".join(lines) + "\n"


def _emit(doc, fmt):
    click.echo(formats.dump(doc) if fmt == "json" else _text(doc), nl=False)


def _write(path, doc):
    if path:
        with open(path, "w") as fh:
            fh.write(formats.dump(doc))


def _run(ctx, name, body):
    p = ctx.params
    command = {"name": name, "order": p.get("order"),
               "energy_cutoff": None if p.get("energy_cutoff") is None
               else str(p["energy_cutoff"]),
               "seed": p.get("seed"), "force": p.get("force", False)}
    try:
        doc = body(command)
    except NcshipError as e:
        doc = _error_report(command, e)
    _emit(doc, p.get("fmt", "json"))
    ctx.exit(doc["exit_code"])


# ------------------------------------------------------------------ commands

def common(f):
    f = click.option("--format", "fmt", type=click.Choice(["json", "text"]), default="json",
                     help="Report format.")(f)
    f = click.option("--output", type=click.Path(dir_okay=False), default=None,
                     help="Where to write the produced store or certificate.")(f)
    f = click.option("--force", is_flag=True, help="Continue past an invalid cocycle.")(f)
    f = click.option("--seed", type=int, default=None,
                     help="Seed for randomized inputs (nothing is random without it).")(f)
    f = click.option("--energy-cutoff", type=str, default=None,
                     help="Energy cutoff E for Novikov coefficients.")(f)
    f = click.option("--order", type=click.IntRange(min=1), default=None,
                     help="Truncation order N (defaults to the file's value).")(f)
    return f


def _cutoff(p):
    c = p.get("energy_cutoff")
    return None if c is None else novikov.parse_rational(c)


@click.group()
def cli():
    """Strong homotopy inner products of A-infinity algebras."""


@cli.command()
@click.argument("algebra", type=click.Path(dir_okay=False))
@common
@click.pass_context
def check(ctx, algebra, **_):
    """Structural checks of an algebra file."""
    p = ctx.params

    def body(command):
        alg = formats.load_algebra(algebra, p["order"], _cutoff(p))
        return _report(command, structure_checks(alg))

    _run(ctx, "check", body)


def structure_checks(alg):
    ids = alg.ids()
    S, A, N = alg.structure, alg.base, alg.order
    G = S.monoid if alg.filtered else novikov.GappedMonoid([(0, 0)], alg.cutoff)
    gap = novikov.gapped_validate(G, S)
    gw = (gap["violations"] or [None])[0]
    if gw is None and gap["untagged"]:
        gw = {"condition": "membership", "beta": gap["untagged"][0]}
    checks = [_check("gapped", gap["pass"], gw)]
    if gap["pass"]:
        defect = novikov.filtered_ainfty_defect(S, N) if alg.filtered else ainfty_defect(A, N)
        checks.append(_check("ainfty", not defect, _defect_witness(defect, ids)))
    else:
        checks.append(_check("ainfty", None))
    if A.unit is None:
        checks.append(_check("unit", None))
    else:
        bad = unit_check(A)
        w = None
        if bad:
            w = dict(bad[0], inputs=[ids[i] for i in bad[0]["inputs"]],
                     value=_vec(bad[0]["value"], ids))
        checks.append(_check("unit", not bad, w))
    if alg.pairing is None:
        checks.append(_check("cyclicity", None))
    else:
        if alg.filtered:
            cyc = novikov.filtered_cyclicity(S, alg.pairing, N)
            eq = {}
            for beta in sorted(cyc["per_beta"]):
                eq = cyc["per_beta"][beta]
                break
        else:
            cyc = sympeq.cyclicity_defect(A, alg.pairing, N)
            eq = cyc["equation"]
        w = _first(eq)
        witness = None if w is None else {"word": [ids[a] for a in w], "value": eq[w]}
        checks.append(_check("cyclicity", cyc["pass"], witness, routes_agree=cyc["agree"]))
    return checks


@cli.command()
@click.argument("algebra", type=click.Path(dir_okay=False))
@click.argument("cocycle", type=click.Path(dir_okay=False), required=False)
@common
@click.pass_context
def tilde(ctx, algebra, cocycle, **_):
    """Bimodule map of a negative cyclic cocycle, with SHIP checks."""
    p = ctx.params

    def body(command):
        alg = formats.load_algebra(algebra, p["order"], _cutoff(p))
        A, N, ids = alg.base, alg.order, alg.ids()
        if cocycle is not None:
            columns = formats.load_cochains(cocycle, alg)
        elif p["seed"] is not None:
            solve_on = novikov.rational_base(alg.structure) if alg.filtered else A
            columns = hochcyc.random_cocycle(solve_on, rng(p["seed"]), 2, N,
                                             _pairing_degree(alg)).columns
        else:
            raise MalformedInput("give a cocycle file or --seed for a random cocycle")
        val = hochcyc.validate_negative_cocycle(A, columns, N)
        wit = [dict(w, inputs=[ids[i] for i in w["inputs"]], output=ids[w["output"]])
               for w in val["witnesses"]]
        if not val["valid"] and not p["force"]:
            raise PreconditionError(
                "the cochain is not a negative cyclic cocycle (column %d, inputs %s, "
                "output %s); use --force to compute the tilde map anyway"
                % (wit[0]["column"], wit[0]["inputs"], wit[0]["output"]))
        psi = hochcyc.tilde(A, columns, N)
        ship = sympeq.ship_check(psi, A, N)
        bim = hochcyc.bimodule_defect(A, psi, N)
        tr = hochcyc.trace_compare(A, columns, N)
        tw = next((r for r in tr["pairs"] if not r["equal"]), None)
        if tw is not None:
            tw = dict(tw, a=ids[tw["a"]], b=ids[tw["b"]])
        checks = [
            _check("cocycle", val["valid"], wit[0] if wit else None),
            _check("bimodule", not bim, None if not bim else _entry(_first_entry(bim), ids)),
            _check("skew", ship["skew"], None if ship["skew_witness"] is None
                   else _entry(ship["skew_witness"], ids)),
            _check("closed", ship["closed"], None, routes_agree=ship["closed_routes_agree"]),
            _check("nondegenerate", ship["nondegenerate"], None),
            _check("trace", tr["pass"], tw),
        ]
        doc = formats.bimodmap_to_doc(psi, ids)
        if cocycle is None:
            doc["cocycle"] = formats.cochain_to_doc(columns, ids)["columns"]
        _write(p["output"], doc)
        return _report(command, checks, {"gram": ship["gram"], "entries": len(psi)})

    _run(ctx, "tilde", body)


def _pairing_degree(alg):
    """Total shifted degree of the pairing (0 when the file has none); random
    cocycles are drawn in this degree so their tilde can be nondegenerate."""
    if alg.pairing is None:
        return 0
    deg = alg.base.deg
    for a, row in enumerate(alg.pairing):
        for b, c in enumerate(row):
            if c:
                return deg[a] + deg[b]
    return 0


def _first_entry(store):
    return min(store, key=lambda e: (len(e[0]) + len(e[2]), e))


@cli.command()
@click.argument("algebra", type=click.Path(dir_okay=False))
@click.argument("eta", type=click.Path(dir_okay=False))
@common
@click.pass_context
def equivalence(ctx, algebra, eta, **_):
    """Automorphism relating omega and omega + d L_Q alpha_eta."""
    p = ctx.params

    def body(command):
        alg = formats.load_algebra(algebra, p["order"], _cutoff(p))
        if alg.pairing is None:
            raise MalformedInput("equivalence needs a pairing in the algebra file")
        cols = formats.load_cochains(eta, alg)
        if len(cols) != 1:
            raise MalformedInput("eta must be a single cochain (use \"entries\")")
        eta_entries = cols[0]
        N, ids = alg.order, alg.ids()
        omega = sympeq.ConstantTwoForm(alg.pairing, alg.base.deg)
        if alg.filtered:
            cert = novikov.filtered_equivalence(alg.structure, omega, eta_entries, N)
            hom = novikov.filtered_homomorphism_defect(cert.automorphism, alg.structure, N)
            space = alg.structure.space(N)
            eta_entries = {k: novikov._novikov(c, alg.cutoff) for k, c in eta_entries.items()}
        else:
            cert = sympeq.equivalence_automorphism(alg.base, omega, eta_entries, N)
            hom = homomorphism_defect(cert.automorphism, alg.base, alg.base, N)
            space = FormSpace(alg.base.deg, N)
        w0 = omega.form(space)
        moved = w0 + d_cyc(lie_derivative(q_from_structure(alg.base, space),
                                          oneform_from_cochain(eta_entries, space)))
        diag = sympeq.diagram_check(cert.automorphism, bimodmap_from_twoform(w0),
                                    bimodmap_from_twoform(moved), space)
        dw = diag["witness"]
        if dw is not None:
            dw = dict(dw, entry=_entry(dw["entry"], ids))
        residual_w = _first(cert.residual.terms)
        checks = [
            _check("residual", not cert.residual,
                   None if residual_w is None else [_letter_word(residual_w, ids)]),
            _check("routes_agree", cert.checks["routes_agree"]),
            _check("brackets_vanish", cert.checks["brackets_vanish"]),
            _check("homomorphism", not hom, _defect_witness(hom, ids)),
            _check("diagram", diag["pass"], dw),
        ]
        steps = [{"order": s["order"],
                  "field": [{"component": ids[i], "word": _letter_word(w, ids), "c": c}
                            for i, w, c in sorted(s["field"].terms(),
                                                  key=lambda t: (t[0], len(t[1]), t[1]))]}
                 for s in cert.steps]
        verdicts = {c["name"]: c["status"] for c in checks}
        _write(p["output"], formats.cohom_to_doc(cert.automorphism, ids, {
            "steps": formats.jsonable(steps), "verdicts": verdicts}))
        return _report(command, checks, {"steps": steps,
                                         "components": len(cert.automorphism.components)})

    _run(ctx, "equivalence", body)


def _letter_word(w, ids):
    return [formats.letter_name(a, ids) for a in w]


@cli.command()
@click.argument("form", type=click.Path(dir_okay=False))
@common
@click.pass_context
def darboux(ctx, form, **_):
    """Coordinate change making a closed 2-form constant."""
    p = ctx.params

    def body(command):
        ff = formats.load_form(form, p["order"], _cutoff(p))
        ids, N = ff.ids(), ff.order
        try:
            if ff.filtered:
                S = novikov.FilteredAInfty(ff.basis, {}, ff.monoid, N)
                F, const = novikov.filtered_darboux(ff.terms, S, N)
                space = S.space(N)
                full = CyclicForm(space, {w: novikov._novikov(c, ff.cutoff)
                                          for w, c in ff.terms.items()})
            else:
                full = ff.form()
                space = full.space
                F, const = sympeq.darboux(full)
        except Obstruction as e:
            t = e.report.get("offending_term")
            if t:
                t["word"] = _letter_word(t["word"], ids)
            raise
        ok = pullback_by_cohom(F, full) == const.form(space)
        checks = [_check("recomputed", ok)]
        _write(p["output"], formats.cohom_to_doc(F, ids, {
            "constant_form": formats.jsonable(const.matrix)}))
        return _report(command, checks, {"constant_form": const.matrix,
                                         "components": len(F.components)})

    _run(ctx, "darboux", body)


def main(argv=None):
    """Entry point; usage errors exit with the input-error code."""
    try:
        code = cli.main(args=argv, prog_name="ncship", standalone_mode=False)
    except click.exceptions.Exit as e:
        code = e.exit_code
    except click.ClickException as e:
        e.show()
        code = EXIT_INPUT
    except click.exceptions.Abort:
        code = 1
    sys.exit(code or 0)


if __name__ == "__main__":
    main()
