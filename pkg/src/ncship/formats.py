"""Reading and writing the JSON file formats (schema version 1).

Coefficients are rational strings "p/q"; energy-carrying coefficients are
lists of {"T": exponent, "c": coefficient}.  Words are written with basis
ids, and form letters as "dx:<id>" or "x:<id>".
"""

import json
from fractions import Fraction
from importlib import resources

import jsonschema

from .barcx import AInftyStructure, Cohomomorphism
from .errors import MalformedInput
from .ncgeom import LETTER_X, CyclicForm, FormSpace
from .novikov import (FilteredAInfty, GappedMonoid, NovikovScalar, parse_rational,
                      scalar_from_json, scalar_to_json)
from .signcore import BasisElement

SCHEMA_VERSION = 1
DEFAULT_CUTOFF = Fraction(4)


def _schema(name):
    text = resources.files("ncship").joinpath("schemas", name + ".schema.json").read_text()
    return json.loads(text)


def parse_json(text, name="<input>"):
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise MalformedInput("%s: invalid JSON at line %d, column %d: %s"
                             % (name, e.lineno, e.colno, e.msg))


def validate(doc, kind, name="<input>"):
    validator = jsonschema.Draft202012Validator(_schema(kind))
    errors = sorted(validator.iter_errors(doc), key=lambda e: list(e.absolute_path))
    if errors:
        e = errors[0]
        where = "/".join(str(p) for p in e.absolute_path) or "(root)"
        raise MalformedInput("%s: schema error at %s: %s" % (name, where, e.message))
    return doc


def read(path, kind):
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as e:
        raise MalformedInput("cannot read %s: %s" % (path, e.strerror))
    return validate(parse_json(text, str(path)), kind, str(path))


# ------------------------------------------------------------------ algebras

class AlgebraFile:
    """A parsed algebra definition: the structure plus the optional pairing
    and the truncation actually in force."""

    def __init__(self, structure, pairing, order, cutoff, filtered):
        self.structure = structure
        self.pairing = pairing
        self.order = order
        self.cutoff = cutoff
        self.filtered = filtered

    @property
    def base(self):
        return self.structure.base if self.filtered else self.structure

    def ids(self):
        return [b.id for b in self.base.basis]


def _basis(doc):
    basis = [BasisElement(b["id"], b["degree"], b.get("unit", False)) for b in doc["basis"]]
    index = {}
    for i, b in enumerate(basis):
        if b.id in index:
            raise MalformedInput("duplicate basis id %r" % (b.id,))
        index[b.id] = i
    return basis, index


def _lookup(index, ident, where):
    try:
        return index[ident]
    except KeyError:
        raise MalformedInput("%s: unknown basis id %r" % (where, ident))


def _truncation(doc, order, cutoff):
    trunc = doc.get("truncation", {})
    order = order or trunc.get("order", 8)
    if cutoff is None:
        cutoff = parse_rational(trunc["energy_cutoff"]) if "energy_cutoff" in trunc \
            else DEFAULT_CUTOFF
    return order, Fraction(cutoff)


def algebra_from_doc(doc, order=None, cutoff=None):
    basis, index = _basis(doc)
    order, cutoff = _truncation(doc, order, cutoff)
    filtered = "monoid" in doc
    tagged = {}
    for n, op in enumerate(doc.get("ops", [])):
        where = "ops[%d] m(%s)" % (n, ",".join(op["inputs"]))
        inputs = tuple(_lookup(index, a, where) for a in op["inputs"])
        if "k" in op and op["k"] != len(inputs):
            raise MalformedInput("%s: k = %d but %d inputs given" % (where, op["k"], len(inputs)))
        if "beta" in op and not filtered:
            raise MalformedInput("%s: beta tag given but the file declares no monoid" % where)
        beta = (parse_rational(op["beta"][0]), op["beta"][1]) if "beta" in op \
            else (Fraction(0), 0)
        vec = tagged.setdefault((inputs, beta), {})
        for out, c in op["outputs"].items():
            j = _lookup(index, out, where)
            vec[j] = vec.get(j, 0) + parse_rational(c)
    pairing = None
    if "pairing" in doc:
        pairing = [[parse_rational(c) for c in row] for row in doc["pairing"]]
        if len(pairing) != len(basis) or any(len(r) != len(basis) for r in pairing):
            raise MalformedInput("pairing must be a %d x %d matrix" % (len(basis), len(basis)))
    if filtered:
        G = GappedMonoid([(parse_rational(l), m) for l, m in doc["monoid"]["generators"]],
                         cutoff)
        return AlgebraFile(FilteredAInfty(basis, tagged, G, order), pairing, order, cutoff, True)
    ops = {}
    for (inputs, _), vec in tagged.items():
        ops[inputs] = vec
    return AlgebraFile(AInftyStructure(basis, ops, order), pairing, order, cutoff, False)


def load_algebra(path, order=None, cutoff=None):
    return algebra_from_doc(read(path, "algebra"), order, cutoff)


# ------------------------------------------------------------------ cochains

def _entries_from(rows, index, cutoff, where):
    out = {}
    for n, e in enumerate(rows):
        w = "%s[%d]" % (where, n)
        key = (tuple(_lookup(index, a, w) for a in e["inputs"]), _lookup(index, e["output"], w))
        c = scalar_from_json(e["c"], cutoff)
        out[key] = out.get(key, 0) + c
    return {k: c for k, c in out.items() if c}


def cochains_from_doc(doc, alg):
    index = {b: i for i, b in enumerate(alg.ids())}
    cutoff = alg.cutoff
    if "columns" in doc:
        return [_entries_from(col, index, cutoff, "columns[%d]" % i)
                for i, col in enumerate(doc["columns"])]
    return [_entries_from(doc["entries"], index, cutoff, "entries")]


def load_cochains(path, alg):
    return cochains_from_doc(read(path, "cochain"), alg)


def cochain_to_doc(columns, ids):
    def rows(col):
        return [{"inputs": [ids[a] for a in k[0]], "output": ids[k[1]], "c": scalar_to_json(c)}
                for k, c in sorted(col.items(), key=lambda kv: (len(kv[0][0]), kv[0]))]
    return {"schema": SCHEMA_VERSION, "columns": [rows(c) for c in columns]}


# ------------------------------------------------------------------ forms

def _letter(token, index, where):
    kind, _, ident = token.partition(":")
    i = _lookup(index, ident, where)
    return i if kind == "dx" else LETTER_X + i


def letter_name(code, ids):
    return ("dx:" if code < LETTER_X else "x:") + ids[code % LETTER_X]


class FormFile:
    def __init__(self, basis, terms, order, cutoff, monoid):
        self.basis = basis
        self.terms = terms
        self.order = order
        self.cutoff = cutoff
        self.monoid = monoid

    @property
    def filtered(self):
        return self.monoid is not None

    def ids(self):
        return [b.id for b in self.basis]

    def degrees(self):
        return [b.degree - 1 for b in self.basis]

    def form(self):
        return CyclicForm(FormSpace(self.degrees(), self.order), self.terms)


def form_from_doc(doc, order=None, cutoff=None):
    basis, index = _basis(doc)
    order, cutoff = _truncation(doc, order, cutoff)
    terms = {}
    for n, t in enumerate(doc["terms"]):
        where = "terms[%d]" % n
        word = tuple(_letter(tok, index, where) for tok in t["word"])
        c = scalar_from_json(t["c"], None)
        terms[word] = terms.get(word, 0) + c
    terms = {w: c for w, c in terms.items() if c}
    monoid = None
    if "monoid" in doc:
        monoid = GappedMonoid([(parse_rational(l), m) for l, m in doc["monoid"]["generators"]],
                              cutoff)
    return FormFile(basis, terms, order, cutoff, monoid)


def load_form(path, order=None, cutoff=None):
    return form_from_doc(read(path, "form"), order, cutoff)


# ------------------------------------------------------------------ outputs

def bimodmap_to_doc(psi, ids):
    rows = []
    for (a, v, b, w), c in sorted(psi.items(), key=lambda kv: (len(kv[0][0]) + len(kv[0][2]),
                                                                kv[0])):
        rows.append({"a": [ids[i] for i in a], "v": ids[v], "b": [ids[i] for i in b],
                     "w": ids[w], "c": scalar_to_json(c)})
    return {"schema": SCHEMA_VERSION, "kind": "bimodule_map", "basis": list(ids),
            "entries": rows}


def bimodmap_from_doc(doc, ids, cutoff=None):
    _expect(doc, "bimodule_map", ids)
    index = {b: i for i, b in enumerate(ids)}
    out = {}
    for r in doc["entries"]:
        key = (tuple(index[i] for i in r["a"]), index[r["v"]],
               tuple(index[i] for i in r["b"]), index[r["w"]])
        out[key] = scalar_from_json(r["c"], cutoff)
    return out


def cohom_to_doc(F, ids, extra=None):
    rows = []
    for inputs, vec in sorted(F.components.items(), key=lambda kv: (len(kv[0]), kv[0])):
        rows.append({"inputs": [ids[i] for i in inputs],
                     "outputs": {ids[j]: scalar_to_json(c) for j, c in sorted(vec.items())}})
    doc = {"schema": SCHEMA_VERSION, "kind": "cohomomorphism", "basis": list(ids),
           "order": F.order, "components": rows}
    doc.update(extra or {})
    return doc


def cohom_from_doc(doc, ids, cutoff=None):
    _expect(doc, "cohomomorphism", ids)
    index = {b: i for i, b in enumerate(ids)}
    comps = {}
    for r in doc["components"]:
        comps[tuple(index[i] for i in r["inputs"])] = {
            index[j]: scalar_from_json(c, cutoff) for j, c in r["outputs"].items()}
    return Cohomomorphism(comps, len(ids), doc["order"], True)


def _expect(doc, kind, ids):
    if doc.get("schema") != SCHEMA_VERSION or doc.get("kind") != kind:
        raise MalformedInput("expected a schema-%d %s file" % (SCHEMA_VERSION, kind))
    if doc.get("basis") != list(ids):
        raise MalformedInput("basis mismatch: file has %r" % (doc.get("basis"),))


def dump(doc):
    """Canonical JSON text: fixed key order from construction, two-space
    indent, trailing newline."""
    return json.dumps(doc, indent=2, ensure_ascii=True) + "\n"


def jsonable(x):
    """Convert witness values (tuples, Fractions, Novikov scalars) to JSON."""
    if isinstance(x, (Fraction, NovikovScalar)):
        return scalar_to_json(x)
    if isinstance(x, bool) or x is None or isinstance(x, (int, str)):
        return x
    if isinstance(x, dict):
        return {str(k): jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [jsonable(v) for v in x]
    raise TypeError("cannot serialize %r" % (x,))
