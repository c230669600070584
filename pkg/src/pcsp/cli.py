"""Command-line interface.

Exit codes: 0 success, 1 well-formed but infeasible (nothing can be covered,
or the asked-for world or decision gets no coverage), 2 input error.
"""

from __future__ import annotations

import argparse
import json
import sys
import threading
import time
from collections.abc import Sequence

from . import oracle
from .conditional import PICKERS, solve_conditional
from .decomposition import covered_environment
from .io import conditional_from_dict, conditional_to_dict, dumps, fmt_prob, load_problem
from .model import ProblemError, ProblemSpec, property_f, validate
from .pure import search_optimal_pure

EXIT_OK, EXIT_INFEASIBLE, EXIT_INPUT = 0, 1, 2


def _assignment(text: str) -> dict[str, str]:
    out = {}
    for item in filter(None, (s.strip() for s in text.split(","))):
        name, sep, value = item.partition("=")
        if not sep:
            raise argparse.ArgumentTypeError(f"expected name=value, got {item!r}")
        out[name.strip()] = value.strip()
    return out


def _coerce(spec: ProblemSpec, assignment: dict[str, str]) -> dict:
    """Map command-line strings onto domain values (which may be numbers)."""
    out = {}
    for name, text in assignment.items():
        domain = spec.domains.get(name)
        if domain is None:
            raise ProblemError(f"unknown name {name!r}")
        match = [v for v in domain if str(v) == text or (isinstance(v, bool) and str(v).lower() == text)]
        if not match:
            raise ProblemError(f"value {text!r} not in domain of {name!r}")
        out[name] = match[0]
    return out


def _progress_sink(enabled: bool):
    if not enabled:
        return None

    def sink(record: dict) -> None:
        record = dict(record)
        for key in ("incumbent_ps", "p_good", "p_bad"):
            if key in record:
                record[key] = fmt_prob(record[key])
        record["elapsed_ms"] = round(record["elapsed_ms"], 3)
        sys.stderr.write(json.dumps(record) + "\n")
        sys.stderr.flush()

    return sink


def _stop_flag(budget_ms: float | None):
    """A cancellation flag tripped by a timer thread after ``budget_ms``."""
    if budget_ms is None:
        return None, None
    flag = threading.Event()
    timer = threading.Timer(budget_ms / 1000.0, flag.set)
    timer.daemon = True
    timer.start()
    return flag.is_set, timer


def _echo(args: argparse.Namespace, keys: Sequence[str]) -> dict:
    return {
        "command": args.command,
        "file": args.file,
        "options": {k: getattr(args, k) for k in keys},
    }


def cmd_validate(args) -> tuple[dict, int]:
    from .io import problem_from_dict

    with open(args.file, encoding="utf-8") as fh:
        text = fh.read()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ProblemError(f"syntax error: {exc.msg} (line {exc.lineno}, column {exc.colno})") from None
    spec = problem_from_dict(doc)
    diags = validate(spec)
    out = _echo(args, [])
    out["result"] = {
        "valid": not diags,
        "diagnostics": [{"rule": d.rule, "subject": d.subject, "message": d.message} for d in diags],
        "property_f": property_f(spec) if not diags else {},
        "parameters": len(spec.parameters),
        "variables": len(spec.variables),
        "constraints": len(spec.constraints),
    }
    return out, EXIT_OK if not diags else EXIT_INPUT


def cmd_analyze(args) -> tuple[dict, int]:
    spec = load_problem(args.file)
    t0 = time.perf_counter()
    report = oracle.analyze(spec)
    out = _echo(args, [])
    out["result"] = {
        "p_cons": fmt_prob(report.p_cons),
        "p_spd": fmt_prob(report.p_spd),
        "optimal_pure": [spec.decision_dict(d) for d in report.optimal_pure],
        "good": [
            {"world": spec.world_dict(w), "probability": fmt_prob(report.world_probs[w])}
            for w in report.good_worlds
        ],
        "bad": [
            {"world": spec.world_dict(w), "probability": fmt_prob(report.world_probs[w])}
            for w in report.bad_worlds
        ],
        "strongly_consistent": abs(report.p_spd - 1.0) <= oracle.TOL,
    }
    out["statistics"] = {"worlds": len(report.world_probs), "decisions": len(report.ps_table)}
    _timing(args, out, t0)
    return out, EXIT_OK if report.p_cons > 0 else EXIT_INFEASIBLE


def cmd_solve_pure(args) -> tuple[dict, int]:
    spec = load_problem(args.file)
    should_stop, timer = _stop_flag(args.budget_ms)
    t0 = time.perf_counter()
    try:
        outcome = search_optimal_pure(
            spec,
            max_nodes=args.budget_nodes,
            should_stop=should_stop,
            progress=_progress_sink(args.progress),
            smallest_domain_first=args.order == "smallest-domain",
        )
    finally:
        if timer is not None:
            timer.cancel()
    out = _echo(args, ["budget_nodes", "budget_ms", "order"])
    out["result"] = {
        "decision": None if outcome.best is None else spec.decision_dict(outcome.best),
        "ps": fmt_prob(outcome.best_ps),
        "proven_optimal": outcome.proven_optimal,
        "interrupted": outcome.interrupted,
    }
    out["statistics"] = {"nodes": outcome.nodes_expanded}
    _timing(args, out, t0)
    return out, EXIT_OK if outcome.best_ps > 0 else EXIT_INFEASIBLE


def cmd_solve_conditional(args) -> tuple[dict, int]:
    spec = load_problem(args.file)
    should_stop, timer = _stop_flag(args.budget_ms)
    t0 = time.perf_counter()
    try:
        cd = solve_conditional(
            spec,
            max_iterations=args.budget_iterations,
            should_stop=should_stop,
            picker=args.picker,
            progress=_progress_sink(args.progress),
        )
    finally:
        if timer is not None:
            timer.cancel()
    out = _echo(args, ["budget_iterations", "budget_ms", "picker"])
    out["result"] = conditional_to_dict(spec, cd)
    out["statistics"] = {"iterations": cd.iterations, "rules": len(cd.pairs), "decisions": len(cd.decisions())}
    _timing(args, out, t0)
    return out, EXIT_OK if cd.p_good > 0 else EXIT_INFEASIBLE


def cmd_eval(args) -> tuple[dict, int]:
    spec = load_problem(args.file)
    out = _echo(args, ["decision", "world", "policy"])
    result: dict = {}
    code = EXIT_OK
    if args.decision is None and args.world is None:
        raise ProblemError("eval needs --decision and/or --world with --policy")
    if args.decision is not None:
        d = spec.as_decision(_coerce(spec, args.decision))
        if all(spec.property_f(c) for c in spec.constraints):
            wc = covered_environment(spec, d)
            ps = 0.0 if wc is None else wc.probability
        else:
            ps = oracle.ps_of_decision(spec, d)
        result["decision"] = spec.decision_dict(d)
        result["ps"] = fmt_prob(ps)
        if ps <= 0:
            code = EXIT_INFEASIBLE
    if args.world is not None:
        if args.policy is None:
            raise ProblemError("--world needs --policy")
        with open(args.policy, encoding="utf-8") as fh:
            try:
                policy_doc = json.load(fh)
            except json.JSONDecodeError as exc:
                raise ProblemError(f"policy syntax error: {exc.msg} (line {exc.lineno})") from None
        cd = conditional_from_dict(spec, policy_doc)
        w = spec.as_world(_coerce(spec, args.world))
        d = cd.lookup(w)
        result["world"] = spec.world_dict(w)
        result["policy_decision"] = None if d is None else spec.decision_dict(d)
        if d is None:
            code = EXIT_INFEASIBLE
    out["result"] = result
    return out, code


def _timing(args, out: dict, t0: float) -> None:
    if args.timing:
        out.setdefault("statistics", {})["wall_ms"] = round((time.perf_counter() - t0) * 1000.0, 3)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pcsp", description="Probabilistic CSP solver")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("file", help="problem file (JSON)")
        p.add_argument("--timing", action="store_true", help="include wall time in statistics")
        p.add_argument("--seed", type=int, default=None, help="reserved; all commands are deterministic")

    common(sub.add_parser("validate", help="check a problem file"))
    common(sub.add_parser("analyze", help="enumerate worlds and decisions (small problems only)"))

    p = sub.add_parser("solve-pure", help="most probable pure decision (branch and bound)")
    common(p)
    p.add_argument("--budget-nodes", type=int, default=None)
    p.add_argument("--budget-ms", type=float, default=None)
    p.add_argument("--order", choices=("static", "smallest-domain"), default="static")
    p.add_argument("--progress", action="store_true", help="stream incumbents to stderr")

    p = sub.add_parser("solve-conditional", help="anytime optimal conditional decision")
    common(p)
    p.add_argument(
        "--budget-iterations", "--budget-nodes", dest="budget_iterations", type=int, default=None,
        help="stop after this many iterations",
    )
    p.add_argument("--budget-ms", type=float, default=None)
    p.add_argument("--picker", choices=PICKERS, default="maxprob")
    p.add_argument("--progress", action="store_true", help="stream iterations to stderr")

    p = sub.add_parser("eval", help="PS of a decision, or a policy's decision for a world")
    common(p)
    p.add_argument("--decision", type=_assignment, help="e.g. x1=R,x2=T")
    p.add_argument("--world", type=_assignment, help="e.g. l1=c,l2=nc,l3=c")
    p.add_argument("--policy", help="result document written by solve-conditional")
    return parser


COMMANDS = {
    "validate": cmd_validate,
    "analyze": cmd_analyze,
    "solve-pure": cmd_solve_pure,
    "solve-conditional": cmd_solve_conditional,
    "eval": cmd_eval,
}


def run_cli(argv: Sequence[str] | None = None, stdout=None) -> int:
    stdout = stdout if stdout is not None else sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        doc, code = COMMANDS[args.command](args)
    except (ProblemError, OSError, ValueError, KeyError) as exc:
        sys.stderr.write(f"pcsp {args.command}: error: {exc}\n")
        return EXIT_INPUT
    stdout.write(dumps(doc))
    return code


def main() -> None:
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
