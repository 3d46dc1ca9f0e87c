import json
import subprocess
import sys

import numpy as np
import pytest

from hyperspace import cli
from hyperspace.demos import line_sample
from hyperspace.errors import UsageError
from hyperspace.io import (
    action_from_dict,
    dumps_report,
    finite_space_from_dict,
    finite_space_to_dict,
    load_cloud,
    load_finite_space,
    save_cloud,
    save_finite_space,
)
from hyperspace.metric import FiniteSpace, euclidean_cutoff
from hyperspace.quotient import orbit_closure


def run(capsys, *argv):
    code = cli.main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


class TestFormats:
    def test_strict_lower_triangle(self):
        sp = finite_space_from_dict({"n": 3, "dist": [0.1, 0.2, 0.3]})
        assert sp.dist.tolist() == [[0, 0.1, 0.2], [0.1, 0, 0.3], [0.2, 0.3, 0]]

    def test_triangle_with_diagonal(self):
        sp = finite_space_from_dict({"n": 2, "dist": [0, 0.4, 0]})
        assert sp.dist.tolist() == [[0, 0.4], [0.4, 0]]

    def test_wrong_length(self):
        with pytest.raises(UsageError):
            finite_space_from_dict({"n": 3, "dist": [0.1, 0.2]})
        with pytest.raises(UsageError):
            finite_space_from_dict({"dist": []})

    def test_round_trip(self, tmp_path, rng):
        sp = FiniteSpace.from_points(rng.random((5, 2)), euclidean_cutoff())
        sp = FiniteSpace(sp.dist, labels=list("abcde"), coords=sp.coords)
        save_finite_space(sp, tmp_path / "s.json")
        back = load_finite_space(tmp_path / "s.json")
        assert np.array_equal(back.dist, sp.dist)
        assert back.labels == list("abcde")
        assert finite_space_to_dict(back) == finite_space_to_dict(sp)

    def test_clouds(self, tmp_path):
        save_cloud([[0.0, 1.0], [2.0, 3.5]], tmp_path / "c.json")
        assert load_cloud(tmp_path / "c.json") == [[0.0, 1.0], [2.0, 3.5]]
        (tmp_path / "e.json").write_text("  \n")
        assert load_cloud(tmp_path / "e.json") == []
        (tmp_path / "w.json").write_text('{"points": [1, 2]}')
        assert load_cloud(tmp_path / "w.json") == [1, 2]
        (tmp_path / "bad.json").write_text("[1, 2")
        with pytest.raises(UsageError):
            load_cloud(tmp_path / "bad.json")

    def test_actions(self):
        sp = FiniteSpace(np.full((3, 3), 0.5) - 0.5 * np.eye(3))
        act = action_from_dict({"generators": [{"type": "permutation", "table": [1, 2, 0]}]}, sp)
        assert sorted(orbit_closure(0, act, 1e-9).points.points.tolist()) == [0, 1, 2]
        with pytest.raises(UsageError):
            action_from_dict({"generators": [{"type": "warp"}]}, sp)
        with pytest.raises(UsageError):
            action_from_dict({"generators": []}, sp)
        with pytest.raises(UsageError):
            action_from_dict({"generators": [{"type": "permutation", "table": [1, 2, 0]},
                                             {"type": "identity"}]}, sp)

    def test_report_encodes_non_finite(self):
        assert json.loads(dumps_report({"x": float("inf"), "y": [float("nan")]})) == {"x": "inf", "y": ["nan"]}


class TestDist:
    def test_identical_files(self, tmp_path, capsys):
        save_cloud([[0.0, 0.0], [0.3, 0.4]], tmp_path / "a.json")
        code, out, _ = run(capsys, "dist", tmp_path / "a.json", tmp_path / "a.json")
        assert code == 0
        assert "hausdorff      0\n" in out

    def test_empty_file(self, tmp_path, capsys):
        save_cloud([[0.0, 0.0]], tmp_path / "a.json")
        (tmp_path / "e.json").write_text("")
        code, out, _ = run(capsys, "dist", tmp_path / "a.json", tmp_path / "e.json")
        assert code == 0 and "hausdorff      1\n" in out
        code, out, _ = run(capsys, "dist", tmp_path / "e.json", tmp_path / "e.json")
        assert "hausdorff      0\n" in out

    def test_metrics_on_lines(self, tmp_path, capsys):
        save_cloud(line_sample(1.0), tmp_path / "l1.json")
        save_cloud(line_sample(2.0), tmp_path / "l2.json")
        code, out, _ = run(capsys, "dist", tmp_path / "l1.json", tmp_path / "l2.json", "--fast")
        assert code == 0 and "hausdorff      1\n" in out
        code, out, _ = run(capsys, "dist", tmp_path / "l1.json", tmp_path / "l2.json",
                           "--metric", "disk-pullback", "--fast")
        assert code == 0
        d = float(out.split("hausdorff")[1].split()[0])
        assert 0.3 < d < 0.33
        assert "PASS  fast kernel equals brute force" in out

    def test_matrix_metric(self, tmp_path, capsys):
        save_finite_space(FiniteSpace([[0, 0.3, 0.5], [0.3, 0, 0.4], [0.5, 0.4, 0]]), tmp_path / "m.json")
        save_cloud([0, 1], tmp_path / "a.json")
        save_cloud([2], tmp_path / "b.json")
        code, out, _ = run(capsys, "dist", tmp_path / "a.json", tmp_path / "b.json",
                           "--metric", f"matrix:{tmp_path / 'm.json'}")
        assert code == 0 and "hausdorff      0.5\n" in out

    def test_parse_errors(self, tmp_path, capsys):
        (tmp_path / "bad.json").write_text("{oops")
        save_cloud([[0.0]], tmp_path / "a.json")
        assert run(capsys, "dist", tmp_path / "bad.json", tmp_path / "a.json")[0] == 2
        assert run(capsys, "dist", tmp_path / "missing.json", tmp_path / "a.json")[0] == 2
        assert run(capsys, "dist", tmp_path / "a.json", tmp_path / "a.json", "--metric", "taxicab")[0] == 2
        assert run(capsys, "dist", tmp_path / "a.json", tmp_path / "a.json", "--eps", "-1")[0] == 2


class TestVerify:
    @pytest.mark.parametrize("suite", ["metric", "universal", "continuity", "compactness"])
    def test_suites_pass(self, suite, capsys):
        code, out, _ = run(capsys, "verify", suite, "--count", 5)
        assert code == 0, out
        assert "FAIL" not in out

    def test_corrupted_matrix(self, tmp_path, capsys):
        doc = {"n": 3, "dist": [0.2, 0.9, 0.3]}
        (tmp_path / "m.json").write_text(json.dumps(doc))
        code, out, _ = run(capsys, "verify", "metric", "--metric", f"matrix:{tmp_path / 'm.json'}",
                           "--output", tmp_path / "r.json")
        assert code == 1 and "FAIL" in out
        report = json.loads((tmp_path / "r.json").read_text())
        violations = report["checks"][0]["violations"]
        assert violations and all(v["check"] == "triangle" for v in violations)
        assert max(v["residual"] for v in violations) == pytest.approx(0.4)

    def test_reports_are_deterministic(self, tmp_path, capsys):
        for name in ("a", "b"):
            run(capsys, "verify", "universal", "--count", 4, "--output", tmp_path / f"{name}.json")
        assert (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()
        run(capsys, "verify", "universal", "--count", 4, "--seed", 7, "--output", tmp_path / "c.json")
        assert (tmp_path / "a.json").read_bytes() != (tmp_path / "c.json").read_bytes()


class TestExamples:
    @pytest.mark.parametrize("name", ["example1-lines", "halfline-scaling", "circle-rotation", "collision-family"])
    def test_examples_pass(self, name, capsys):
        code, out, _ = run(capsys, "example", name)
        assert code == 0, out

    def test_unknown_example(self, capsys):
        code, _, err = run(capsys, "example", "klein-bottle")
        assert code == 2 and "unknown example" in err

    def test_plot_output(self, tmp_path, capsys):
        out = tmp_path / "rot.json"
        code, _, _ = run(capsys, "example", "circle-rotation", "--n", 16, "--k", 4, "--output", out)
        assert code == 0
        rows = (tmp_path / "rot.plot.csv").read_text().splitlines()
        assert rows[0] == "class,x,y" and len(rows) == 5
        assert json.loads(out.read_text())["quotient"]["classes"] == 4


class TestQuotientCommand:
    def test_permutation_on_finite_space(self, tmp_path, capsys):
        sp = FiniteSpace.from_points([[0, 0], [1, 0], [0, 1], [1, 1]], euclidean_cutoff())
        save_finite_space(sp, tmp_path / "s.json")
        (tmp_path / "a.json").write_text(json.dumps({"generators": [{"type": "permutation", "table": [1, 0, 3, 2]}]}))
        code, out, _ = run(capsys, "quotient", tmp_path / "s.json", tmp_path / "a.json", "--cluster-tol", 0.01)
        assert code == 0 and "classes 2" in out

    def test_scaling_on_a_cloud(self, tmp_path, capsys):
        save_cloud(np.linspace(0, 1, 41)[:, None], tmp_path / "c.json")
        gens = [{"type": "scale", "c": c} for c in (2, 0.5, 3, 1 / 3)]
        (tmp_path / "a.json").write_text(json.dumps({"generators": gens}))
        code, out, _ = run(capsys, "quotient", tmp_path / "c.json", tmp_path / "a.json",
                           "--output", tmp_path / "q.json")
        assert code == 0 and "classes 1" in out
        report = json.loads((tmp_path / "q.json").read_text())
        assert report["quotient"]["removed_samples"] == [0, 40]

    def test_bad_action(self, tmp_path, capsys):
        save_cloud([[0.5]], tmp_path / "c.json")
        (tmp_path / "a.json").write_text(json.dumps({"generators": [{"type": "permutation", "table": [0]}]}))
        assert run(capsys, "quotient", tmp_path / "c.json", tmp_path / "a.json")[0] == 2


def test_module_entry_point(tmp_path):
    save_cloud([[0.0, 0.0]], tmp_path / "a.json")
    proc = subprocess.run([sys.executable, "-m", "hyperspace.cli", "dist", str(tmp_path / "a.json"),
                           str(tmp_path / "a.json")], capture_output=True, text=True)
    assert proc.returncode == 0 and "hausdorff      0" in proc.stdout
