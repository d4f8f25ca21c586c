import json

import pytest

from pegrec.cli import main
from pegrec.dsl import parse_grammar
from pegrec.model import grammar_eq

SMALL = """\
start <- AA [BB]^miss AA ;
AA <- 'a' ;
BB <- 'b' ;
%recovery
miss <- '' ;
"""


@pytest.fixture
def small_grammar(tmp_path):
    path = tmp_path / "small.peg"
    path.write_text(SMALL)
    return path


def write(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


# --- annotate --------------------------------------------------------------

def test_annotate_roundtrips_to_file(tmp_path, grammar_dir, tiny_java):
    out = tmp_path / "annotated.peg"
    code = main(["annotate", str(grammar_dir / "tiny_java.peg"),
                 "-o", str(out)])
    assert code == 0
    from pegrec.annotate import annotate
    expected, _ = annotate(tiny_java)
    assert grammar_eq(parse_grammar(out.read_text()), expected)


def test_annotate_stdout_and_report(capsys, grammar_dir):
    code = main(["annotate", str(grammar_dir / "tiny_java.peg"), "--report"])
    captured = capsys.readouterr()
    assert code == 0
    assert "%recovery" in captured.out
    assert "inserted" in captured.err
    assert "Err_Prog_1" in captured.err


def test_annotate_preserve_and_prefix(capsys, grammar_dir):
    code = main(["annotate", str(grammar_dir / "tiny_java_labeled.peg"),
                 "--preserve", "--prefix", "Syn"])
    captured = capsys.readouterr()
    assert code == 0
    # hand labels survive, fresh ones use the requested prefix
    assert "^rpw" in captured.out
    assert "Syn_Prog_1" in captured.out
    assert "Err_" not in captured.out


def test_annotate_report_to_json_file(tmp_path, grammar_dir):
    out = tmp_path / "annotated.peg"
    report_path = tmp_path / "report.json"
    code = main(["annotate", str(grammar_dir / "tiny_java.peg"),
                 "-o", str(out), "--report", str(report_path)])
    assert code == 0
    data = json.loads(report_path.read_text())
    assert len(data["inserted"]) == 40
    assert len(data["skipped"]) == 29
    first = data["inserted"][0]
    assert first["rule"] == "Prog" and first["label"] == "Err_Prog_1"


def test_annotate_bad_grammar_exits_2(capsys, tmp_path):
    path = write(tmp_path, "bad.peg", "start <- Missing ;")
    assert main(["annotate", path]) == 2
    assert "pegrec:" in capsys.readouterr().err


# --- analyze -----------------------------------------------------------------

def test_analyze_prints_both_sets_by_default(capsys, small_grammar):
    assert main(["analyze", str(small_grammar)]) == 0
    out = capsys.readouterr().out
    assert "FIRST(start) = { AA }" in out
    assert "FOLLOW(start) = { EOF }" in out


def test_analyze_first_only(capsys, small_grammar):
    assert main(["analyze", str(small_grammar), "--first"]) == 0
    out = capsys.readouterr().out
    assert "FIRST(start)" in out
    assert "FOLLOW" not in out


def test_analyze_single_rule_lists_kinds(capsys, small_grammar, tmp_path):
    assert main(["analyze", str(small_grammar), "--first", "start"]) == 0
    assert capsys.readouterr().out == "AA\n"
    assert main(["analyze", str(small_grammar), "--follow", "start"]) == 0
    assert capsys.readouterr().out == "EOF\n"

    nullable = write(tmp_path, "n.peg", "start <- AA? ;\nAA <- 'a' ;")
    assert main(["analyze", nullable, "--first", "start"]) == 0
    assert capsys.readouterr().out == "AA\nε\n"


def test_analyze_unknown_rule_exits_2(capsys, small_grammar):
    assert main(["analyze", str(small_grammar), "--first", "Nope"]) == 2
    assert "unknown rule" in capsys.readouterr().err


# --- parse -------------------------------------------------------------------

def test_parse_clean_exit_0(capsys, tmp_path, small_grammar):
    src = write(tmp_path, "ok.txt", "a b a")
    assert main(["parse", str(small_grammar), src]) == 0
    captured = capsys.readouterr()
    assert captured.err == ""


def test_parse_recovered_exit_1_with_message(capsys, tmp_path, small_grammar):
    src = write(tmp_path, "broken.txt", "a a")
    assert main(["parse", str(small_grammar), src]) == 1
    captured = capsys.readouterr()
    assert captured.err == f"{src}:1: syntax error, expected BB\n"


def test_parse_failed_exit_2(capsys, tmp_path, small_grammar):
    src = write(tmp_path, "hopeless.txt", "b")
    assert main(["parse", str(small_grammar), src]) == 2
    assert "syntax error" in capsys.readouterr().err


def test_parse_json_tree(capsys, tmp_path, small_grammar):
    src = write(tmp_path, "broken.txt", "a a")
    assert main(["parse", str(small_grammar), src, "--json"]) == 1
    data = json.loads(capsys.readouterr().out)
    assert data["rule"] == "start"
    kinds = [c.get("token") or c.get("error") for c in data["children"]]
    assert kinds == ["AA", "miss", "AA"]


def test_parse_custom_messages(capsys, tmp_path, small_grammar):
    src = write(tmp_path, "broken.txt", "a a")
    msgs = write(tmp_path, "m.json", json.dumps({"miss": "b required"}))
    main(["parse", str(small_grammar), src, "--messages", msgs])
    assert "b required" in capsys.readouterr().err


def test_parse_suppress_within(capsys, tmp_path):
    grammar = write(tmp_path, "g.peg", """\
start <- Item Item Item ;
Item <- CC [AA]^e ;
CC <- 'c' ;
AA <- 'a' ;
BB <- 'b' ;
%recovery
e <- (!CC .)* ;
""")
    src = write(tmp_path, "src.txt", "c b c b c a")
    main(["parse", grammar, src])
    assert capsys.readouterr().err.count("syntax error") == 2
    assert main(["parse", grammar, src, "--suppress-within", "5"]) == 1
    assert capsys.readouterr().err.count("syntax error") == 1


def test_parse_missing_file_exits_2(capsys, small_grammar):
    assert main(["parse", str(small_grammar), "/nonexistent/f.txt"]) == 2
    assert "pegrec:" in capsys.readouterr().err


# --- eval --------------------------------------------------------------------

def corpus_with(tmp_path, label):
    corpus = tmp_path / "corpus"
    corpus.mkdir()
    (corpus / "c1.bad").write_text("a a")
    (corpus / "c1.ok").write_text("a b a")
    (corpus / "c1.label").write_text(label)
    return corpus


def test_eval_table_and_exit_0(capsys, tmp_path, small_grammar):
    corpus = corpus_with(tmp_path, "miss")
    assert main(["eval", str(small_grammar), str(corpus)]) == 0
    out = capsys.readouterr().out
    assert "excellent" in out and "100.0%" in out


def test_eval_label_mismatch_exit_1(capsys, tmp_path, small_grammar):
    corpus = corpus_with(tmp_path, "wrong")
    assert main(["eval", str(small_grammar), str(corpus)]) == 1
    assert "label mismatches: 1" in capsys.readouterr().out


def test_eval_json(capsys, tmp_path, small_grammar):
    corpus = corpus_with(tmp_path, "miss")
    assert main(["eval", str(small_grammar), str(corpus), "--json"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert data["counts"]["excellent"] == 1
    assert data["cases"][0]["first_label"] == "miss"
