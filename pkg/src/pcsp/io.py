"""JSON problem files and result documents.

Problem file::

    {
      "parameters":  [{"name": "l1", "values": [{"value": "c", "prob": 0.6}, ...]}, ...],
      "variables":   [{"name": "x1", "values": ["W", "R"]}, ...],
      "constraints": [{"name": "C1", "scope": ["x1", "x2"], "allowed": [["W", "F"], ...]}, ...]
    }

``prob`` is a number or a rational string such as ``"3/5"``.  Values are JSON
strings, numbers or booleans.  Order in the file is the canonical order.
"""

from __future__ import annotations

import json
from collections.abc import Mapping
from typing import Any

from .model import (
    ConditionalDecision,
    Constraint,
    DecisionVariable,
    Environment,
    Parameter,
    ProblemError,
    ProblemSpec,
    parse_probability,
    validate,
)


class ProblemFormatError(ProblemError):
    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        where = f" (line {line}, column {column})" if line is not None else ""
        super().__init__(message + where)
        self.line = line
        self.column = column


def fmt_prob(p: float | None) -> float | None:
    """Round to 12 significant digits for output."""
    return None if p is None else float(f"{p:.12g}")


def _require(cond: bool, message: str) -> None:
    if not cond:
        raise ProblemFormatError(message)


def _scalar(v: Any, where: str):
    _require(
        isinstance(v, (str, int, float, bool)) and v is not None,
        f"{where}: values must be strings, numbers or booleans, got {v!r}",
    )
    return v


def _list(doc: Mapping, key: str, where: str) -> list:
    value = doc.get(key, [])
    _require(isinstance(value, list), f"{where}: {key!r} must be a list")
    return value


def problem_from_dict(doc: Any) -> ProblemSpec:
    _require(isinstance(doc, dict), "top level must be an object")
    unknown = set(doc) - {"parameters", "variables", "constraints"}
    _require(not unknown, f"unknown top-level keys {sorted(unknown)}")

    params = []
    for i, p in enumerate(_list(doc, "parameters", "document")):
        where = f"parameters[{i}]"
        _require(isinstance(p, dict) and isinstance(p.get("name"), str), f"{where}: needs a string 'name'")
        entries = _list(p, "values", where)
        values, probs = [], []
        for j, entry in enumerate(entries):
            _require(
                isinstance(entry, dict) and "value" in entry and "prob" in entry,
                f"{where}.values[{j}]: needs 'value' and 'prob'",
            )
            values.append(_scalar(entry["value"], f"{where}.values[{j}]"))
            try:
                probs.append(parse_probability(entry["prob"]))
            except (ValueError, ZeroDivisionError) as exc:
                raise ProblemFormatError(f"{where}.values[{j}]: {exc}") from None
        params.append(Parameter(p["name"], values, probs))

    variables = []
    for i, x in enumerate(_list(doc, "variables", "document")):
        where = f"variables[{i}]"
        _require(isinstance(x, dict) and isinstance(x.get("name"), str), f"{where}: needs a string 'name'")
        values = [_scalar(v, f"{where}.values") for v in _list(x, "values", where)]
        variables.append(DecisionVariable(x["name"], values))

    constraints = []
    for i, c in enumerate(_list(doc, "constraints", "document")):
        where = f"constraints[{i}]"
        _require(isinstance(c, dict) and isinstance(c.get("name"), str), f"{where}: needs a string 'name'")
        scope = _list(c, "scope", where)
        _require(all(isinstance(n, str) for n in scope), f"{where}: scope entries must be names")
        allowed = []
        for t in _list(c, "allowed", where):
            _require(isinstance(t, list), f"{where}: each allowed tuple must be a list")
            allowed.append(tuple(_scalar(v, f"{where}.allowed") for v in t))
        constraints.append(Constraint(c["name"], scope, allowed))

    return ProblemSpec(params, variables, constraints)


def parse_problem(text: str) -> ProblemSpec:
    """Parse and validate a problem document."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ProblemFormatError(f"syntax error: {exc.msg}", exc.lineno, exc.colno) from None
    spec = problem_from_dict(doc)
    diags = validate(spec)
    if diags:
        raise ProblemError("invalid problem: " + "; ".join(str(d) for d in diags), diags)
    return spec


def load_problem(path: str) -> ProblemSpec:
    with open(path, encoding="utf-8") as fh:
        return parse_problem(fh.read())


def problem_to_dict(spec: ProblemSpec) -> dict:
    return {
        "parameters": [
            {"name": p.name, "values": [{"value": v, "prob": q} for v, q in zip(p.values, p.probs)]}
            for p in spec.parameters
        ],
        "variables": [{"name": x.name, "values": list(x.values)} for x in spec.variables],
        "constraints": [
            {"name": c.name, "scope": list(c.scope), "allowed": [list(t) for t in c.allowed]}
            for c in spec.constraints
        ],
    }


def serialize_problem(spec: ProblemSpec) -> str:
    return dumps(problem_to_dict(spec))


def dumps(doc: Any) -> str:
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"


# -- results


def environment_doc(spec: ProblemSpec, e: Environment) -> dict:
    return spec.environment_dict(e)


def conditional_to_dict(spec: ProblemSpec, cd: ConditionalDecision) -> dict:
    return {
        "p_good": fmt_prob(cd.p_good),
        "p_bad": fmt_prob(cd.p_bad),
        "complete": cd.complete,
        "rules": [
            {
                "environment": environment_doc(spec, e),
                "decision": spec.decision_dict(d),
                "probability": fmt_prob(e.probability),
            }
            for e, d in cd.pairs
        ],
        "bad": [
            {"environment": environment_doc(spec, e), "probability": fmt_prob(e.probability)}
            for e in cd.bad
        ],
        "pending": [
            {"environment": environment_doc(spec, e), "probability": fmt_prob(e.probability)}
            for e in cd.pending
        ],
    }


def conditional_from_dict(spec: ProblemSpec, doc: Mapping) -> ConditionalDecision:
    """Rebuild a conditional decision from a result document (or its payload)."""
    if "result" in doc:
        doc = doc["result"]
    try:
        pairs = [
            (spec.environment(r["environment"]), spec.as_decision(r["decision"]))
            for r in doc["rules"]
        ]
        bad = [spec.environment(b["environment"]) for b in doc.get("bad", [])]
        pending = [spec.environment(b["environment"]) for b in doc.get("pending", [])]
        return ConditionalDecision(
            pairs=pairs,
            bad=bad,
            p_good=float(doc["p_good"]),
            p_bad=float(doc["p_bad"]),
            pending=pending,
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ProblemFormatError(f"malformed policy document: {exc}") from None
