import json

import pytest

from alcomega.cli import main
from alcomega.semantics import check_kb, load_model
from alcomega.syntax import parse_kb
from test_dltrans import EAGLE_T


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_translate_alcoi(capsys, kb_dir):
    code, out, _ = run(capsys, "translate", kb_dir / "eagle.kb", "--to", "alcoi")
    assert code == 0 and out == EAGLE_T


def test_translate_to_file(capsys, kb_dir, tmp_path):
    target = tmp_path / "kt.kb"
    assert run(capsys, "translate", kb_dir / "eagle.kb", "--to", "alc-neg", "-o", target)[0] == 0
    assert "neg($e)" in target.read_text()


def test_translate_lc_with_query(capsys, kb_dir):
    code, out, _ = run(capsys, "translate", kb_dir / "eagle.kb", "--to", "lc-omega", "--query", "CannotHunt(harry).")
    assert code == 0
    assert out.rstrip().endswith("# query\n$B_harry in CannotHunt.")


def test_translate_set_needs_query(capsys, kb_dir):
    assert run(capsys, "translate", kb_dir / "eagle.kb", "--to", "set-star")[0] == 64


def test_translate_tptp(capsys, tmp_path):
    kb = tmp_path / "k.kb"
    kb.write_text("A [= Pow(B).\n")
    code, out, _ = run(capsys, "translate", kb, "--to", "set-lc", "--query", "A [= Pow(B).", "--format", "tptp")
    assert code == 0 and out.startswith("fof(goal,conjecture,")


def test_decide_entailed(capsys, kb_dir):
    code, out, _ = run(capsys, "decide", kb_dir / "eagle.kb", "--query", "CannotHunt(harry).")
    assert code == 0
    assert out.startswith("Entailed (tableau;")
    assert "our filtration estimate" in out


def test_decide_not_entailed_with_witness(capsys, kb_dir, tmp_path):
    model = tmp_path / "w.json"
    code, out, _ = run(capsys, "decide", kb_dir / "eagle.kb", "--query", "CannotHunt [= Eagle.",
                       "--emit-witness", model)
    assert code == 1 and out.startswith("NotEntailed")
    K = parse_kb((kb_dir / "eagle.kb").read_text())
    assert check_kb(load_model(model.read_text()), K).satisfied
    code, out, _ = run(capsys, "check-model", model, kb_dir / "eagle.kb", "--query", "CannotHunt [= Eagle.")
    assert code == 0 and "query fails" in out


def test_decide_batch(capsys, kb_dir, tmp_path):
    qs = tmp_path / "q.txt"
    qs.write_text("CannotHunt(harry).\nCannotHunt [= Eagle.\n")
    code, out, _ = run(capsys, "decide", kb_dir / "eagle.kb", "--query-file", qs)
    rows = [line.split("\t") for line in out.splitlines()]
    assert code == 0
    assert rows[0] == ["query", "verdict", "source", "detail"]
    assert [r[1] for r in rows[1:]] == ["Entailed", "NotEntailed"]


def test_decide_is_reproducible(capsys, kb_dir):
    args = ("decide", kb_dir / "eagle.kb", "--query", "CannotHunt [= Eagle.", "--seed", "3")
    assert run(capsys, *args) == run(capsys, *args)


@pytest.mark.parametrize("argv, code", [
    (["decide", "{kb}"], 64),
    (["decide", "{kb}", "--query", "Lion(harry)."], 64),
    (["decide", "{kb}", "--query", "Eagle [= ."], 65),
    (["decide", "{kb}", "--query", "Eagle(harry).", "--bound", "1"], 64),
    (["decide", "missing.kb", "--query", "Eagle(harry)."], 66),
    (["frobnicate"], 64),
])
def test_exit_codes(capsys, kb_dir, argv, code):
    argv = [a.format(kb=kb_dir / "eagle.kb") for a in argv]
    try:
        got = main(argv)
    except SystemExit as exc:
        got = exc.code
    capsys.readouterr()
    assert got == code


def test_check_model_failure(capsys, kb_dir, tmp_path):
    model = tmp_path / "m.json"
    model.write_text(json.dumps({"nodes": ["h"], "atoms": ["h"], "individuals": {"harry": "h"}}))
    code, out, _ = run(capsys, "check-model", model, kb_dir / "eagle.kb")
    assert code == 1
    assert "FAIL  Eagle(harry).  (violated)" in out


def test_solve_sets_and_dot(capsys, kb_dir, tmp_path):
    dot = tmp_path / "cycle.dot"
    code, out, _ = run(capsys, "solve-sets", kb_dir / "cycle.eq", "--dot", dot)
    assert code == 0
    assert "well-founded: no" in out
    assert "TC(y) = {a, b, x, y}" in out
    code, out, _ = run(capsys, "emit-dot", kb_dir / "cycle.eq")
    assert code == 0 and out == dot.read_text()
    assert out.count("->") == 5


def test_emit_dot_from_model(capsys, tmp_path):
    model = tmp_path / "m.json"
    model.write_text(json.dumps({"nodes": ["a", "s"], "atoms": ["a"], "elems": {"s": ["a"]}}))
    code, out, _ = run(capsys, "emit-dot", model)
    assert code == 0 and out.count("->") == 1


def test_roundtrip(capsys, kb_dir):
    code, out, _ = run(capsys, "roundtrip", "--trials", "20", "--seed", "1")
    assert code == 0 and out.rstrip().endswith("PASS")
    code, out, _ = run(capsys, "roundtrip", kb_dir / "eagle.kb", "--trials", "5")
    assert code == 0 and out.startswith("trials: 5")
