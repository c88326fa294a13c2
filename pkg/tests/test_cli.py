"""Command-line harness: round trips, exit codes, reproducibility."""

import pytest

from monoreach.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestBuildEvalStats:
    def test_build_then_stats(self, tmp_path, capsys):
        out = str(tmp_path / "c.mc")
        code, text, _ = run(capsys, "build", "--mode", "explicit", "--n", "16", "--out", out)
        assert code == 0
        assert "depth 29" in text
        code, text, _ = run(capsys, "stats", "--circuit", out)
        assert code == 0
        assert "depth: 29" in text
        assert "valid: yes" in text
        assert (tmp_path / "c.mc.ledger.csv").exists()
        ledger = (tmp_path / "c.mc.ledger.csv").read_text()
        assert ledger.splitlines()[-1].startswith("2,or,5,5")

    def test_eval_single_edge(self, tmp_path, capsys):
        circ = str(tmp_path / "c2.mc")
        run(capsys, "build", "--mode", "squaring", "--n", "2", "--out", circ)
        graph = tmp_path / "g.gr"
        graph.write_text("GRAPH 2\n01\n00\n")
        code, text, _ = run(capsys, "eval", "--circuit", circ, "--graph", str(graph))
        assert code == 0
        assert text.strip() == "1"

    def test_build_exact_requires_l(self, tmp_path, capsys):
        code, _, err = run(capsys, "build", "--mode", "exact", "--n", "4", "--out", str(tmp_path / "x.mc"))
        assert code == 2
        assert "--l" in err

    def test_max_gates_budget_refusal(self, tmp_path, capsys):
        code, _, err = run(
            capsys, "build", "--mode", "squaring", "--n", "64", "--max-gates", "1000",
            "--out", str(tmp_path / "big.mc"),
        )
        assert code == 2
        assert "max-gates" in err
        assert not (tmp_path / "big.mc").exists()

    def test_theorem_mode_build(self, tmp_path, capsys):
        out = str(tmp_path / "t.mc")
        code, text, _ = run(capsys, "build", "--mode", "theorem", "--n", "9", "--l", "4", "--seed", "3", "--out", out)
        assert code == 0
        code, _, _ = run(capsys, "verify", "--circuit", out, "--n", "9", "--mode", "planted", "--samples", "400", "--seed", "1", "--l", "4")
        assert code == 0


class TestVerify:
    def test_exhaustive_pass(self, tmp_path, capsys):
        out = str(tmp_path / "c.mc")
        run(capsys, "build", "--mode", "explicit", "--n", "4", "--out", out)
        code, text, _ = run(capsys, "verify", "--circuit", out, "--n", "4", "--mode", "exhaustive")
        assert code == 0
        assert "no mismatches" in text

    def test_random_pass(self, tmp_path, capsys):
        out = str(tmp_path / "c.mc")
        run(capsys, "build", "--mode", "explicit", "--n", "16", "--out", out)
        code, text, _ = run(
            capsys, "verify", "--circuit", out, "--n", "16", "--mode", "random",
            "--samples", "2000", "--seed", "7",
        )
        assert code == 0

    def test_mismatch_prints_graph_and_fails(self, tmp_path, capsys):
        # A circuit whose output is the zero wire claims nothing is reachable.
        bogus = tmp_path / "zero.mc"
        bogus.write_text("MCIRC 1 2\nOUT 4\n")
        code, text, _ = run(capsys, "verify", "--circuit", str(bogus), "--n", "2", "--mode", "exhaustive")
        assert code == 1
        assert "MISMATCH" in text
        assert "GRAPH 2" in text

    def test_promise_skip_counting(self, tmp_path, capsys):
        out = str(tmp_path / "c.mc")
        run(capsys, "build", "--mode", "squaring", "--n", "8", "--l", "2", "--out", out)
        code, text, _ = run(
            capsys, "verify", "--circuit", out, "--n", "8", "--mode", "random",
            "--samples", "3000", "--seed", "2", "--l", "2", "--p", "0.1",
        )
        assert code == 0
        assert "skipped" in text


class TestFamilyCommands:
    def test_plane_round_trip(self, tmp_path, capsys):
        fam = str(tmp_path / "f.fam")
        code, text, _ = run(capsys, "family", "plane", "--n", "4", "--out", fam)
        assert code == 0
        code, text, _ = run(capsys, "family", "check", "--file", fam, "--mode", "exact")
        assert code == 0
        assert text.strip() == "pass"

    def test_sample_and_check(self, tmp_path, capsys):
        fam = str(tmp_path / "s.fam")
        code, _, _ = run(
            capsys, "family", "sample", "--n", "16", "--m", "16", "--s", "12",
            "--l", "8", "--d", "8", "--seed", "5", "--out", fam,
        )
        assert code == 0
        code, text, _ = run(capsys, "family", "check", "--file", fam, "--mode", "sampled", "--trials", "5000")
        assert code == 0
        assert "no-violation-found" in text

    def test_check_reports_counterexample(self, tmp_path, capsys):
        fam = tmp_path / "bad.fam"
        fam.write_text("FAMILY 2 4 1 2 1\n1\n1\n1\n1\n")
        code, text, _ = run(capsys, "family", "check", "--file", str(fam), "--mode", "exact")
        assert code == 1
        assert "counterexample" in text


class TestPredict:
    def test_single_prediction(self, capsys):
        code, text, _ = run(capsys, "predict", "--mode", "explicit", "--n", "2^64")
        assert code == 0
        assert "ratio to (log2 n)^2" in text

    def test_table(self, capsys):
        code, text, _ = run(capsys, "predict", "--table")
        assert code == 0
        lines = text.strip().splitlines()
        assert lines[0] == "e,squaring,explicit,theorem"
        assert len(lines) == 9

    def test_missing_n(self, capsys):
        code, _, err = run(capsys, "predict", "--mode", "squaring")
        assert code == 2


class TestReproducibility:
    def test_identical_builds_are_byte_identical(self, tmp_path, capsys):
        a = tmp_path / "a.mc"
        b = tmp_path / "b.mc"
        for out in (a, b):
            code, _, _ = run(
                capsys, "build", "--mode", "theorem", "--n", "16", "--l", "8",
                "--seed", "99", "--out", str(out),
            )
            assert code == 0
        assert a.read_bytes() == b.read_bytes()

    def test_seed_changes_family_file(self, tmp_path, capsys):
        a = tmp_path / "a.fam"
        b = tmp_path / "b.fam"
        for seed, out in ((1, a), (2, b)):
            run(capsys, "family", "sample", "--n", "12", "--m", "12", "--s", "10",
                "--l", "6", "--d", "6", "--seed", str(seed), "--out", str(out))
        assert a.read_bytes() != b.read_bytes()


class TestErrors:
    def test_unknown_subcommand_exits_2(self, capsys):
        with pytest.raises(SystemExit) as err:
            main(["frobnicate"])
        assert err.value.code == 2

    def test_missing_file_exits_2(self, capsys):
        code, _, err = run(capsys, "stats", "--circuit", "/nonexistent/c.mc")
        assert code == 2

    def test_bad_circuit_file_exits_2(self, tmp_path, capsys):
        bad = tmp_path / "bad.mc"
        bad.write_text("MCIRC 9 9\n")
        code, _, err = run(capsys, "stats", "--circuit", str(bad))
        assert code == 2
        assert "error" in err
