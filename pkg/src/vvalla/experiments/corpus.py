"""Problem documents: a YAML stream with one ring per document.

Each document has the fields ``characteristic`` (a prime), ``variables``
(names), ``relations`` (polynomials, optional) and ``ideals`` (a mapping from
a name to a list of generators). Anything else is rejected with the offending
field and line.
"""

import hashlib
from dataclasses import dataclass, field

import yaml

from ..errors import InputError, VVError
from ..kernel.ring import PolyRing, is_prime
from ..local_model import build_ring, declare_ideal

FIELDS = ("characteristic", "variables", "relations", "ideals")
REQUIRED = ("characteristic", "variables", "ideals")


@dataclass
class IdealSpec:
    name: str
    generators: list
    line: int


@dataclass
class RingSpec:
    index: int  # 1-based position in the stream
    characteristic: int
    variables: list
    relations: list
    ideals: list
    line: int


@dataclass
class CorpusEntry:
    """A validated (ring, ideal) pair ready for the pipelines."""

    key: str
    ring_index: int
    ideal_name: str
    model: object
    ideal: object
    generators: list = field(default_factory=list)

    def describe(self):
        return {"key": self.key, "ring": self.model.describe(), "ideal": self.ideal.render(),
                "characteristic": self.model.p}


@dataclass
class Corpus:
    rings: list
    entries: list
    digest: str
    text: str


def _line(node):
    return node.start_mark.line + 1


def _scalar(node, where):
    if not isinstance(node, yaml.ScalarNode):
        raise InputError("expected a scalar", where, _line(node))
    return node.value


def _seq(node, where):
    if not isinstance(node, yaml.SequenceNode):
        raise InputError("expected a list", where, _line(node))
    return node.value


def _map(node, where):
    if not isinstance(node, yaml.MappingNode):
        raise InputError("expected a mapping", where, _line(node))
    out = {}
    for k, v in node.value:
        name = _scalar(k, where)
        if name in out:
            raise InputError("duplicate key", f"{where}.{name}" if where else name, _line(k))
        out[name] = (k, v)
    return out


def _ring_spec(node, index):
    top = _map(node, None)
    for name, (k, _) in top.items():
        if name not in FIELDS:
            raise InputError(f"unknown field in document {index}", name, _line(k))
    for name in REQUIRED:
        if name not in top:
            raise InputError(f"missing field in document {index}", name, _line(node))
    k, v = top["characteristic"]
    text = _scalar(v, "characteristic")
    try:
        p = int(text)
    except ValueError:
        raise InputError("characteristic must be an integer", "characteristic", _line(v)) from None
    if not is_prime(p):
        raise InputError(f"characteristic {p} is not prime", "characteristic", _line(v))
    names = [_scalar(n, "variables") for n in _seq(top["variables"][1], "variables")]
    if not names:
        raise InputError("at least one variable is required", "variables", _line(top["variables"][1]))
    relations = []
    if "relations" in top:
        for j, n in enumerate(_seq(top["relations"][1], "relations")):
            relations.append((_scalar(n, f"relations[{j}]"), _line(n)))
    ideals = []
    for name, (kn, vn) in _map(top["ideals"][1], "ideals").items():
        gens = []
        for j, g in enumerate(_seq(vn, f"ideals.{name}")):
            gens.append((_scalar(g, f"ideals.{name}[{j}]"), _line(g)))
        if not gens:
            raise InputError("an ideal needs at least one generator", f"ideals.{name}", _line(vn))
        ideals.append(IdealSpec(name, gens, _line(kn)))
    if not ideals:
        raise InputError("no ideals declared", "ideals", _line(top["ideals"][1]))
    return RingSpec(index, p, names, relations, ideals, _line(node))


def _parse_each(ring, items, where):
    out = []
    for j, (text, line) in enumerate(items):
        try:
            out.append(ring(text))
        except VVError as exc:
            raise InputError(str(exc), f"{where}[{j}]", line) from None
    return out


def parse_corpus(text):
    """Parse and validate a YAML stream; raises InputError with field and line."""
    try:
        nodes = [n for n in yaml.compose_all(text) if n is not None]
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        raise InputError(f"malformed document: {getattr(exc, 'problem', exc)}", None,
                         mark.line + 1 if mark else None) from None
    if not nodes:
        raise InputError("empty input")
    rings = [_ring_spec(n, i + 1) for i, n in enumerate(nodes)]
    entries = []
    for spec in rings:
        try:
            free = PolyRing(spec.variables, spec.characteristic)
        except VVError as exc:
            raise InputError(str(exc), "variables", spec.line) from None
        rels = _parse_each(free, spec.relations, "relations")
        try:
            model = build_ring(spec.characteristic, spec.variables, [str(r) for r in rels])
        except VVError as exc:
            raise InputError(str(exc), "relations", spec.line) from None
        for ideal in spec.ideals:
            where = f"ideals.{ideal.name}"
            gens = _parse_each(model.poly_ring, ideal.generators, where)
            try:
                declared = declare_ideal(model, [str(g) for g in gens])
            except VVError as exc:
                raise InputError(str(exc), where, ideal.line) from None
            key = f"ring{spec.index}.{ideal.name}"
            entries.append(CorpusEntry(key, spec.index, ideal.name, model, declared,
                                       [str(g) for g in gens]))
    digest = hashlib.sha256(text.encode("utf-8")).hexdigest()
    return Corpus(rings, entries, digest, text)


def load_corpus(path):
    with open(path, encoding="utf-8") as fh:
        return parse_corpus(fh.read())


def bundled_corpus_path():
    from importlib.resources import files

    return str(files("vvalla").joinpath("data", "corpus.yaml"))
