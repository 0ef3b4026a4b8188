"""Run configuration: a JSON document validated against a fixed schema."""
from __future__ import annotations

import copy
import json
import re
from dataclasses import dataclass, field

import jsonschema

from . import hyperbolic as H
from . import words as W
from .errors import DimdropError, ParseError, SchemaError, ValidationError
from .walk import StepDistribution, parse_probability

SCHEMA_VERSION = "1.0"

_word = {"type": "string", "pattern": "^[abAB]*$"}
_prob = {
    "oneOf": [
        {"type": "number", "exclusiveMinimum": 0, "maximum": 1},
        {"type": "string", "pattern": r"^\s*\d+(\.\d*)?(\s*/\s*\d+)?\s*$"},
    ]
}
_pos_int = {"type": "integer", "minimum": 1}
_map = {"type": "array", "items": {"type": "number"}, "minItems": 4, "maxItems": 4}


def _obj(props: dict, required=()) -> dict:
    return {"type": "object", "properties": props, "required": list(required), "additionalProperties": False}


SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "dimdrop run configuration",
    **_obj({
        "schema_version": {"type": "string"},
        "mu": {
            "oneOf": [
                {"const": "uniform4"},
                {"type": "array", "minItems": 1, "items": _obj({"word": {"type": "string"}, "prob": _prob}, ["word", "prob"])},
            ]
        },
        "rep": {
            "oneOf": [
                _obj({"type": {"const": "standard"}, "L": {"type": "number", "exclusiveMinimum": 0}}, ["type", "L"]),
                _obj({
                    "type": {"const": "explicit"},
                    "a": _map,
                    "b": _map,
                    "arcs": {"type": "array", "minItems": 4, "maxItems": 4,
                             "items": {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2}},
                }, ["type", "a", "b"]),
            ]
        },
        "solver": _obj({"tol": {"type": "number", "exclusiveMinimum": 0}, "max_iter": _pos_int}),
        "sampling": _obj({
            "seed": {"type": "integer", "minimum": 0},
            "trials": {"type": "integer", "minimum": 100},
            "ray_length": {"type": "integer", "minimum": 50},
            "steps": _pos_int,
            "mc_trials": _pos_int,
        }),
        "dimension": _obj({
            "depth": {"type": "integer", "minimum": 1, "maximum": 10},
            "tol": {"type": "number", "minimum": 1e-10},
            "oracle_depth": {"type": "integer", "minimum": 1, "maximum": 8},
        }),
        "validate": _obj({"radius": _pos_int}),
        "measure": _obj({"words": {"type": "array", "items": {"type": "string"}}, "max_length": _pos_int, "mc": {"type": "boolean"}}),
        "sample": _obj({"n": _pos_int, "draws": _pos_int}),
        "hmdim": _obj({"stability": {"type": "boolean"}}),
        "powerword": _obj({"word": _word, "n_max": {"type": "integer", "minimum": 2, "maximum": 200}}),
        "gibbs": _obj({"lengths": {"type": "array", "items": {"type": "integer", "minimum": 1, "maximum": 9}, "minItems": 1}}),
        "additivity": _obj({"w1": _word, "w2": _word}),
        "figures": _obj({"depth": {"type": "integer", "minimum": 1, "maximum": 8}, "size": {"type": "integer", "minimum": 100}}),
    }),
}

DEFAULTS = {
    "solver": {"tol": 1e-12, "max_iter": 1_000_000},
    "sampling": {"seed": 0, "trials": 1000, "ray_length": 400, "steps": 400, "mc_trials": 100_000},
    "dimension": {"depth": 6, "tol": 1e-8, "oracle_depth": 6},
    "validate": {"radius": None},
    "measure": {"words": None, "max_length": 1, "mc": True},
    "sample": {"n": 20, "draws": 10},
    "hmdim": {"stability": True},
    "powerword": {"word": "a", "n_max": 20},
    "gibbs": {"lengths": [1, 2, 4, 6, 8]},
    "additivity": {"w1": "aa", "w2": "ab"},
    "figures": {"depth": 4, "size": 600},
}

# config sections read by each command, for --help
COMMAND_FIELDS = {
    "validate": ["mu", "validate.radius"],
    "graph": ["mu"],
    "measure": ["mu", "solver.tol", "solver.max_iter", "measure.words", "measure.max_length", "measure.mc",
                "sampling.seed", "sampling.steps", "sampling.mc_trials"],
    "sample": ["mu", "solver.tol", "solver.max_iter", "sample.n", "sample.draws", "sampling.seed"],
    "hdim": ["rep", "dimension.depth", "dimension.tol", "dimension.oracle_depth"],
    "hmdim": ["mu", "rep", "solver.tol", "solver.max_iter", "sampling.seed", "sampling.trials",
              "sampling.ray_length", "hmdim.stability"],
    "report": ["mu", "rep", "solver.tol", "solver.max_iter", "sampling.seed", "sampling.trials",
               "sampling.ray_length", "dimension.depth", "dimension.tol"],
    "additivity": ["rep", "additivity.w1", "additivity.w2"],
    "powerword": ["mu", "rep", "solver.tol", "solver.max_iter", "powerword.word", "powerword.n_max",
                  "dimension.depth", "dimension.tol"],
    "gibbs": ["mu", "rep", "solver.tol", "solver.max_iter", "gibbs.lengths", "dimension.depth", "dimension.tol"],
    "figures": ["rep", "mu", "figures.depth", "figures.size"],
}


@dataclass
class RunConfig:
    raw: dict
    mu: StepDistribution | None = None
    rep: H.SchottkyRep | None = None
    options: dict = field(default_factory=dict)

    def section(self, name: str) -> dict:
        return self.options[name]

    def require(self, *names: str) -> None:
        for n in names:
            if getattr(self, n) is None:
                raise SchemaError(f"missing required field '{n}' for this command", n)


def _locate(text: str, needle: str) -> tuple:
    m = re.search(re.escape(json.dumps(needle)), text)
    if not m:
        return None, None
    line = text.count("\n", 0, m.start()) + 1
    col = m.start() - (text.rfind("\n", 0, m.start()) + 1) + 1
    return line, col


def _path(err: jsonschema.ValidationError) -> str:
    out = ""
    for p in err.absolute_path:
        out += f"[{p}]" if isinstance(p, int) else (f".{p}" if out else str(p))
    return out or "<root>"


def _build_mu(value, text: str) -> StepDistribution:
    if value == "uniform4":
        return StepDistribution.nearest_neighbor()
    atoms: dict = {}
    for i, item in enumerate(value):
        try:
            w = W.parse_word(item["word"])
        except ParseError as exc:
            line, col = _locate(text, item["word"])
            raise ParseError(f"mu[{i}].word: {exc}", line, col) from exc
        try:
            p = parse_probability(item["prob"])
        except (ValueError, ZeroDivisionError) as exc:
            line, col = _locate(text, item["prob"]) if isinstance(item["prob"], str) else (None, None)
            raise ParseError(f"mu[{i}].prob: {exc}", line, col) from exc
        if w in atoms:
            raise ValidationError(f"mu[{i}]: word {W.format_word(w)} listed twice")
        atoms[w] = p
    try:
        return StepDistribution(atoms)
    except DimdropError as exc:
        raise ValidationError(f"mu: {exc}", exc) from exc


def _build_rep(value) -> H.SchottkyRep:
    try:
        if value["type"] == "standard":
            return H.standard_schottky(float(value["L"]))
        return H.explicit_schottky(value["a"], value["b"], value.get("arcs"))
    except DimdropError as exc:
        raise ValidationError(f"rep: {exc}", exc) from exc
    except ValueError as exc:
        raise ValidationError(f"rep: {exc}", exc) from exc


def parse_config(text: str) -> RunConfig:
    """Parse and validate a JSON config.

    Raises ParseError (with line and column) for malformed text or words,
    SchemaError (with the offending field path) for shape violations and
    ValidationError for well-formed but invalid walks or representations.
    """
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg} at line {exc.lineno} column {exc.colno}", exc.lineno, exc.colno) from exc
    validator = jsonschema.Draft202012Validator(SCHEMA)
    errors = sorted(validator.iter_errors(raw), key=lambda e: (len(list(e.absolute_path)), list(map(str, e.absolute_path))))
    if errors:
        err = errors[0]
        # a bad letter inside a word is a parse problem, not a shape problem
        if err.validator == "pattern" and isinstance(err.instance, str) and _path(err).endswith(("word", "w1", "w2")):
            line, col = _locate(text, err.instance)
            raise ParseError(f"{_path(err)}: invalid word {err.instance!r}", line, col)
        raise SchemaError(f"{_path(err)}: {err.message}", _path(err))
    options = copy.deepcopy(DEFAULTS)
    for name, section in raw.items():
        if name in options:
            options[name].update(section)
    for sec, key in (("powerword", "word"), ("additivity", "w1"), ("additivity", "w2")):
        try:
            options[sec][key] = W.parse_reduced(options[sec][key])
        except DimdropError as exc:
            raise ValidationError(f"{sec}.{key}: {exc}", exc) from exc
    if options["measure"]["words"] is not None:
        ws = []
        for w in options["measure"]["words"]:
            try:
                ws.append(W.parse_reduced(w))
            except ParseError as exc:
                line, col = _locate(text, w)
                raise ParseError(f"measure.words: {exc}", line, col) from exc
            except DimdropError as exc:
                raise ValidationError(f"measure.words: {exc}", exc) from exc
        options["measure"]["words"] = ws
    mu = _build_mu(raw["mu"], text) if "mu" in raw else None
    rep = _build_rep(raw["rep"]) if "rep" in raw else None
    return RunConfig(raw, mu, rep, options)


def schema_json() -> str:
    return json.dumps(SCHEMA, indent=2, sort_keys=True) + "\n"
