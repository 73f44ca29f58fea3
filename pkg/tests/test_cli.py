import os

from autoseq.cli import main
from autoseq import regseq, seqgen


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_decide_true_with_witness(capsys):
    code, out, _ = run(capsys, "decide",
                       "E i E n (1 <= n) & (A t (t < n) => (tm[i+t] = tm[i+n+t]))")
    assert code == 0
    assert "TRUE" in out and "witness" in out


def test_decide_false(capsys):
    code, out, _ = run(capsys, "decide",
                       "E i E n (1 <= n) & (A t (t <= n) => (tm[i+t] = tm[i+n+t]))")
    assert code == 1
    assert "FALSE" in out


def test_decide_tautology(capsys):
    code, out, _ = run(capsys, "decide", "A n n = n")
    assert code == 0 and "TRUE" in out


def test_parse_error_exit_code(capsys):
    code, _, err = run(capsys, "decide", "E i ) nonsense")
    assert code == 2
    assert "error" in err


def test_resource_ceiling_exit_code(capsys):
    code, _, err = run(capsys, "--max-states", "10", "decide",
                       "E i E n (1 <= n) & (A t (t < n) => (tm[i+t] = tm[i+n+t]))")
    assert code == 3
    assert "ceiling" in err


def test_measure_table(capsys):
    code, out, _ = run(capsys, "measure", "unbordered-count", "tm", "1..16")
    assert code == 0
    values = [int(line.split()[1]) for line in out.strip().splitlines()]
    assert values == [2, 2, 4, 2, 4, 6, 0, 4, 4, 4, 4, 12, 0, 4, 4, 8]


def test_measure_single_value(capsys):
    code, out, _ = run(capsys, "measure", "subword-complexity", "tm", "0..0")
    assert code == 0
    assert out.strip().splitlines()[0] == "0 1"


def test_measure_inf_printed(capsys):
    code, out, _ = run(capsys, "measure", "palindrome-count-at", "tm", "0..2")
    assert code == 0
    assert all(line.split()[1] == "inf" for line in out.strip().splitlines())


def test_eval_seq(capsys):
    code, out, _ = run(capsys, "eval-seq", "tm", "0..11")
    assert code == 0
    values = [int(line.split()[1]) for line in out.strip().splitlines()]
    assert values == [0, 1, 1, 0, 1, 0, 0, 1, 1, 0, 0, 1]


def test_characteristic_export_roundtrip(tmp_path, capsys):
    path = tmp_path / "mod6.dfao"
    code, out, _ = run(capsys, "characteristic", "E q n = 6*q + 1", "0..13",
                       "--export", str(path))
    assert code == 0
    dfao = seqgen.load(path.read_text())
    for n in range(50):
        assert dfao.evaluate(n) == (1 if n % 6 == 1 else 0)


def test_measure_export(tmp_path, capsys):
    path = tmp_path / "complexity.linrep"
    code, out, _ = run(capsys, "measure", "subword-complexity", "tm", "1..4",
                       "--export", str(path))
    assert code == 0
    rep = regseq.load(path.read_text())
    assert rep.evaluate(3) == 6


def test_export_automaton(tmp_path, capsys):
    path = tmp_path / "even.dfa"
    code, out, _ = run(capsys, "export-automaton", "E q n = 2*q",
                       "--out", str(path))
    assert code == 0
    from autoseq import automata
    dfa = automata.load(path.read_text())
    for n in range(20):
        assert dfa.accepts_values((n,)) == (n % 2 == 0)


def test_seq_binding_from_file(tmp_path, capsys):
    path = tmp_path / "const.dfao"
    path.write_text(seqgen.store(seqgen.Dfao(2, [[0, 0]], 0, [0])))
    code, out, _ = run(capsys, "--seq", f"c={path}", "eval-seq", "c", "0..3")
    assert code == 0
    values = [int(line.split()[1]) for line in out.strip().splitlines()]
    assert values == [0, 0, 0, 0]


def test_oracle_compare_pass(capsys):
    code, out, _ = run(capsys, "oracle-compare", "subword-complexity", "tm", "40")
    assert code == 0
    assert "PASS" in out


def test_oracle_compare_certification_refusal(capsys):
    code, _, err = run(capsys, "oracle-compare", "subword-complexity", "tm", "40",
                       "--prefix-len", "100")
    assert code == 3
    assert "certif" in err.lower()


def test_unknown_sequence(capsys):
    code, _, err = run(capsys, "eval-seq", "nope", "0..1")
    assert code == 2
    assert "unknown sequence" in err
