"""The document format: parsing, canonical emission, and the runner."""

import json
from pathlib import Path

import pytest
from hypothesis import given, settings, strategies as st

from intcat.cli import main
from intcat.formats import ParseError, emit_document, parse_document
from intcat.runner import render_human, render_machine, run_document

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"

MINIMAL = "format 1\n"

LATTICE_DOC = """\
format 1
base fin finset
lattice D6 over fin : 1 2 3 6 / 1<2 1<3 2<6 3<6
task complete-check D6
"""


def read_fixture(name):
    return (FIXTURES / name).read_text()


def test_minimal_document_parses():
    doc = parse_document(MINIMAL)
    assert doc.version == 1
    assert doc.declarations == ()
    assert doc.tasks == ()


def test_fixture_documents_round_trip():
    for name in ("divisors.ct", "refusals.ct", "staged.ct"):
        doc = parse_document(read_fixture(name))
        out = emit_document(doc)
        again = parse_document(out)
        assert again == doc, name
        assert emit_document(again) == out, name


def test_emission_is_canonical_under_whitespace_and_comments():
    noisy = ("format   1\n\n# comment\nbase   fin   finset   # trailing\n"
             "lattice D6 over fin : 1 2 3 6 / 1<2 1<3 2<6 3<6\n")
    clean = "format 1\nbase fin finset\nlattice D6 over fin : 1 2 3 6 / 1<2 1<3 2<6 3<6\n"
    assert emit_document(parse_document(noisy)) == \
        emit_document(parse_document(clean))


def test_divisors_shorthand_expands():
    doc = parse_document("format 1\nbase f finset\nlattice D over f : divisors 12\n")
    cat = doc.env["cats"]["D"]
    assert len(cat.obj.at("pt")) == 6
    assert len(cat.arr.at("pt")) == 18


def located(text):
    with pytest.raises(ParseError) as exc:
        parse_document(text)
    return exc.value


def test_error_unknown_name_is_located():
    err = located("format 1\nbase f finset\ntask complete-check missing\n")
    assert err.line == 3
    assert "missing" in err.message


def test_error_bad_pair_element():
    err = located("format 1\nbase f finset\nlattice L over f : a b / a<c\n")
    assert err.line == 3 and err.col == 26
    assert "'c'" in err.message


def test_error_duplicate_name():
    err = located("format 1\nbase f finset\nbase f finset\n")
    assert err.line == 3
    assert "already declared" in err.message


def test_error_unclosed_block():
    err = located("format 1\nbase f finset\npresheaf X over f {\n  at pt : a\n")
    assert "never closed" in err.message


def test_error_wrong_format_line():
    err = located("format 2\n")
    assert err.line == 1


def test_error_non_functorial_table():
    bad = ("format 1\nbase f finset\n"
           "lattice C2 over f : 0 1 / 0<1\n"
           "lattice P over f : a b /\n"
           "functor F : C2 -> P {\n  obj pt : 0=a 1=b\n}\n")
    err = located(bad)
    assert "not determined" in err.message or "functor" in err.message


def test_size_bound_is_enforced():
    doc_text = "format 1\nbase f finset\nlattice L over f : divisors 12\n"
    parse_document(doc_text, max_size=18)
    with pytest.raises(ParseError) as exc:
        parse_document(doc_text, max_size=10)
    assert "size bound" in exc.value.message


def test_map_naturality_checked_at_parse():
    bad = """\
format 1
base two chain 2
presheaf X over two {
  at c0 : p q
  at c1 : x
  act c0<c1 : x=p
}
map m : X -> X {
  at c0 : p=q q=q
  at c1 : x=x
}
"""
    err = located(bad)
    assert "commute" in err.message


def test_report_is_deterministic():
    doc = parse_document(read_fixture("divisors.ct"))
    a = render_machine(run_document(doc))
    b = render_machine(run_document(doc))
    assert a == b


def test_report_digest_covers_body_exactly():
    import hashlib
    doc = parse_document(LATTICE_DOC)
    report = run_document(doc)
    body = {k: v for k, v in report.items() if k != "digest"}
    canon = json.dumps(body, sort_keys=True, indent=2)
    expect = "sha256:" + hashlib.sha256(canon.encode()).hexdigest()
    assert report["digest"] == expect


def test_timing_never_feeds_the_digest():
    doc = parse_document(LATTICE_DOC)
    plain = run_document(doc)
    timed = run_document(doc, timing=True)
    assert "timing" in timed and "timing" not in plain
    assert timed["digest"] == plain["digest"]


def test_task_filter_keeps_matching_tasks():
    doc = parse_document(read_fixture("divisors.ct"))
    report = run_document(doc, only=["aft"])
    ops = [e["op"] for e in report["tasks"]]
    assert ops == ["aft"]
    # aft without its earlier complete-check refuses for a missing capability
    assert report["tasks"][0]["outcome"] == "refused"
    assert report["tasks"][0]["refusal"]["kind"] == "missing_capability"


def test_refusals_do_not_fail_the_run():
    doc = parse_document(read_fixture("refusals.ct"))
    report = run_document(doc)
    outcomes = {e["outcome"] for e in report["tasks"]}
    assert outcomes == {"refused"}
    kinds = [e["refusal"]["kind"] for e in report["tasks"]]
    assert kinds == ["no_meet", "no_meet", "no_universal_cone",
                     "missing_capability"]


def test_runner_outcomes_on_divisors():
    doc = parse_document(read_fixture("divisors.ct"))
    report = run_document(doc)
    assert all(e["outcome"] == "ok" for e in report["tasks"])
    by_op = {(e["op"], tuple(e["args"])): e for e in report["tasks"]}
    assert by_op[("limit", ("two_divisors",))]["witness"]["vertex"]["pt"] == "2"
    assert by_op[("colimit", ("two_divisors",))]["witness"]["vertex"]["pt"] == "12"
    aft = by_op[("aft", ("gcd6",))]["witness"]
    assert aft["left_on_objects"]["pt"] == {"1": "1", "2": "2", "3": "3", "6": "6"}
    assert aft["oracle_agrees"] is True


def test_cli_exit_codes(tmp_path, capsys):
    good = tmp_path / "good.ct"
    good.write_text(LATTICE_DOC)
    assert main(["run", str(good)]) == 0
    capsys.readouterr()
    bad = tmp_path / "bad.ct"
    bad.write_text("format 1\nnonsense here\n")
    assert main(["run", str(bad)]) == 2
    err = capsys.readouterr().err
    assert "line 2" in err
    assert main(["validate", str(good)]) == 0
    assert main(["explain", str(good)]) == 0
    capsys.readouterr()


def test_cli_machine_output_parses_as_json(tmp_path, capsys):
    good = tmp_path / "good.ct"
    good.write_text(LATTICE_DOC)
    assert main(["run", str(good), "--format", "machine"]) == 0
    out = capsys.readouterr().out
    report = json.loads(out)
    assert report["schema"] == "report/1"
    assert report["tasks"][0]["outcome"] == "ok"


def test_cli_missing_file_is_usage_error(capsys):
    assert main(["run", "/nonexistent/nowhere.ct"]) == 2
    capsys.readouterr()


names = st.text(alphabet="abcdefgh", min_size=1, max_size=3)


@settings(max_examples=30, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 5), st.integers(0, 5)),
                max_size=8), st.integers(1, 6))
def test_random_poset_documents_round_trip(pairs, n):
    elems = [f"e{i}" for i in range(n)]
    rel = " ".join(f"e{a}<e{b}" for a, b in pairs if a < n and b < n and a != b)
    body = " ".join(elems) + ((" / " + rel) if rel else "")
    text = f"format 1\nbase f finset\nlattice L over f : {body}\n"
    doc = parse_document(text)
    out = emit_document(doc)
    assert parse_document(out) == doc
    assert emit_document(parse_document(out)) == out
