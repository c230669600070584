import io
import json
import random
from pathlib import Path

import pytest

from pcsp.cli import run_cli
from pcsp.instances import dinner, random_f_instance
from pcsp.io import ProblemFormatError, parse_problem, serialize_problem
from pcsp.model import ProblemError

DINNER = Path(__file__).resolve().parents[1] / "problems" / "dinner.pcsp"


def run(*argv):
    out = io.StringIO()
    code = run_cli([str(a) for a in argv], stdout=out)
    return code, out.getvalue()


def test_parse_dinner():
    spec = parse_problem(DINNER.read_text())
    assert len(spec.parameters) == 3 and len(spec.variables) == 2 and len(spec.constraints) == 4
    assert spec == dinner()


def test_parse_probability_sum_error():
    doc = json.loads(DINNER.read_text())
    doc["parameters"][1]["values"][1]["prob"] = 0.2
    with pytest.raises(ProblemError, match="l2") as info:
        parse_problem(json.dumps(doc))
    assert [d.rule for d in info.value.diagnostics] == ["probability-sum"]


def test_parse_empty_constraints():
    doc = json.loads(DINNER.read_text())
    doc["constraints"] = []
    spec = parse_problem(json.dumps(doc))
    assert spec.constraints == ()


def test_parse_rational_probabilities():
    text = '{"parameters": [{"name": "l", "values": [{"value": "a", "prob": "1/3"}, {"value": "b", "prob": "2/3"}]}],' \
           ' "variables": [{"name": "x", "values": [1]}], "constraints": []}'
    spec = parse_problem(text)
    assert spec.parameters[0].probs == pytest.approx((1 / 3, 2 / 3))


def test_syntax_error_has_position():
    with pytest.raises(ProblemFormatError) as info:
        parse_problem('{\n  "parameters": [,]\n}')
    assert info.value.line == 2


def test_schema_error():
    with pytest.raises(ProblemFormatError, match="allowed"):
        parse_problem('{"variables": [{"name": "x", "values": [1]}], "constraints": [{"name": "c", "scope": ["x"], "allowed": [1]}]}')


@pytest.mark.parametrize("seed", range(50))
def test_round_trip(seed):
    spec = random_f_instance(random.Random(seed), dyadic=seed % 2 == 0)
    assert parse_problem(serialize_problem(spec)) == spec


def test_cli_solve_pure():
    code, out = run("solve-pure", DINNER)
    doc = json.loads(out)
    assert code == 0
    assert doc["result"]["decision"] == {"x1": "R", "x2": "T"}
    assert doc["result"]["ps"] == 0.5 and doc["result"]["proven_optimal"]


def test_cli_solve_conditional(tmp_path):
    code, out = run("solve-conditional", DINNER)
    doc = json.loads(out)
    assert code == 0
    assert doc["result"]["p_good"] == 0.55 and doc["result"]["p_bad"] == 0.45
    assert len(doc["result"]["rules"]) == 3

    policy = tmp_path / "policy.json"
    policy.write_text(out)
    code, out = run("eval", DINNER, "--policy", policy, "--world", "l1=c,l2=nc,l3=c")
    assert code == 0 and json.loads(out)["result"]["policy_decision"] == {"x1": "W", "x2": "F"}
    code, out = run("eval", DINNER, "--policy", policy, "--world", "l1=c,l2=c,l3=c")
    assert code == 1 and json.loads(out)["result"]["policy_decision"] is None


def test_cli_analyze():
    code, out = run("analyze", DINNER)
    doc = json.loads(out)["result"]
    assert code == 0 and doc["p_cons"] == 0.55
    assert sorted(b["probability"] for b in doc["bad"]) == [0.18, 0.27]


def test_cli_eval_decision():
    code, out = run("eval", DINNER, "--decision", "x1=W,x2=F")
    assert code == 0 and json.loads(out)["result"]["ps"] == 0.1
    code, out = run("eval", DINNER, "--decision", "x1=W,x2=B")
    assert code == 1 and json.loads(out)["result"]["ps"] == 0.0


def test_cli_validate(tmp_path):
    code, out = run("validate", DINNER)
    assert code == 0 and json.loads(out)["result"]["valid"]
    bad = tmp_path / "bad.pcsp"
    doc = json.loads(DINNER.read_text())
    doc["constraints"].append({"name": "only", "scope": ["l1"], "allowed": [["c"]]})
    bad.write_text(json.dumps(doc))
    code, out = run("validate", bad)
    assert code == 2
    assert [d["rule"] for d in json.loads(out)["result"]["diagnostics"]] == ["scope"]


def test_cli_input_errors(tmp_path, capsys):
    assert run("solve-pure", tmp_path / "missing.pcsp")[0] == 2
    broken = tmp_path / "broken.pcsp"
    broken.write_text("{")
    assert run("solve-conditional", broken)[0] == 2
    assert run("no-such-command")[0] == 2
    assert "error" in capsys.readouterr().err


def test_cli_infeasible(tmp_path):
    p = tmp_path / "dead.pcsp"
    p.write_text(json.dumps({
        "parameters": [{"name": "l", "values": [{"value": "a", "prob": 1}]}],
        "variables": [{"name": "x", "values": [1, 2]}],
        "constraints": [{"name": "c", "scope": ["x"], "allowed": []}],
    }))
    assert run("solve-pure", p)[0] == 1
    assert run("solve-conditional", p)[0] == 1
    assert run("analyze", p)[0] == 1


def test_cli_deterministic():
    for cmd in ("analyze", "solve-pure", "solve-conditional"):
        assert run(cmd, DINNER) == run(cmd, DINNER)


def test_cli_budgets_and_progress(capsys):
    code, out = run("solve-conditional", DINNER, "--budget-iterations", "1", "--progress", "--picker", "fifo")
    doc = json.loads(out)
    assert not doc["result"]["complete"] and doc["statistics"]["iterations"] == 1
    lines = [json.loads(l) for l in capsys.readouterr().err.splitlines()]
    assert lines and lines[0]["event"] == "iteration"
    assert set(lines[0]) == {"event", "p_good", "p_bad", "iterations", "elapsed_ms"}

    code, out = run("solve-pure", DINNER, "--budget-nodes", "2", "--progress")
    assert json.loads(out)["result"]["interrupted"]
    code, out = run("solve-pure", DINNER, "--budget-ms", "10000", "--timing")
    doc = json.loads(out)
    assert doc["result"]["proven_optimal"] and "wall_ms" in doc["statistics"]


def test_module_entry_point():
    import subprocess
    import sys

    proc = subprocess.run(
        [sys.executable, "-m", "pcsp", "solve-pure", str(DINNER)], capture_output=True, text=True
    )
    assert proc.returncode == 0 and json.loads(proc.stdout)["result"]["ps"] == 0.5
