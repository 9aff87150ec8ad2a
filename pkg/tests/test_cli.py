import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from gnan import io
from gnan.cli import main
from gnan.em import FitResult
from gnan.model import ModelParams, Partition, normalize_rows

SPECS = Path(__file__).resolve().parents[1] / "specs"
FIG2 = str(SPECS / "fig2_community.spec")


def tree(root):
    return {p.relative_to(root): p.read_bytes() for p in sorted(root.rglob("*")) if p.is_file()}


@pytest.fixture(scope="module")
def generated(tmp_path_factory):
    out = tmp_path_factory.mktemp("gen")
    rc = main(["generate", FIG2, "--set", "p_strong=0.9", "--set", "repetitions=1",
               "--seed", "11", "--out", str(out)])
    assert rc == 0
    return out


def test_generate_fig2_emits_one_dataset_per_omega(generated):
    dirs = sorted(p for p in generated.iterdir() if p.is_dir())
    assert len(dirs) == 5
    assert [d.name for d in dirs] == [f"community_x{w}_p0.9_r0" for w in
                                      ("0.02", "0.04", "0.06", "0.08", "0.1")]
    for d in dirs:
        assert {p.name for p in d.iterdir()} == {"edges.tsv", "attrs.tsv", "labels.tsv",
                                                 "blocks.tsv", "deps.tsv"}
    assert io.load_matrix(dirs[2] / "blocks.tsv")[0, 0] == 0.06


def test_generate_is_deterministic(generated, tmp_path):
    main(["generate", FIG2, "--set", "p_strong=0.9", "--set", "repetitions=1",
          "--seed", "11", "--out", str(tmp_path)])
    assert tree(tmp_path) == tree(generated)


def test_generate_errors(tmp_path, capsys):
    assert main(["generate", FIG2, "--set", "repetitions=0", "--out", str(tmp_path)]) == 1
    assert "repetitions" in capsys.readouterr().err
    assert main(["generate", str(tmp_path / "nope.spec")]) == 1
    assert main(["generate", FIG2, "--set", "bogus=1"]) == 1


def test_bad_seed_is_usage_error():
    with pytest.raises(SystemExit) as exc:
        main(["generate", FIG2, "--seed", "-1"])
    assert exc.value.code == 1


def test_fit_single_community_converges(generated, tmp_path, capsys):
    d = sorted(generated.iterdir())[0]
    out = tmp_path / "c1.txt"
    rc = main(["fit", str(d), "--communities", "1", "--restarts", "2", "--out", str(out)])
    line = capsys.readouterr().out
    assert rc == 0 and "converged=1" in line
    res = io.load_fit(out)
    assert res.converged and res.iterations_used <= 2


def test_fit_nonconvergence_exit_code(generated, tmp_path, capsys):
    d = sorted(generated.iterdir())[0]
    rc = main(["fit", str(d), "--max-iters", "2", "--restarts", "1", "--tol", "1e-12",
               "--out", str(tmp_path / "f.txt")])
    assert rc == 2 and "converged=0" in capsys.readouterr().out


def test_fit_missing_dataset(tmp_path):
    assert main(["fit", str(tmp_path / "absent")]) != 0


def test_fit_same_seed_same_file(generated, tmp_path):
    d = sorted(generated.iterdir())[4]
    for name in ("a.txt", "b.txt"):
        main(["fit", str(d), "--restarts", "2", "--max-iters", "30", "--seed", "9",
              "--out", str(tmp_path / name)])
    assert (tmp_path / "a.txt").read_bytes() == (tmp_path / "b.txt").read_bytes()
    main(["fit", str(d), "--restarts", "2", "--max-iters", "30", "--seed", "9", "--threads", "2",
          "--out", str(tmp_path / "c.txt")])
    assert (tmp_path / "a.txt").read_bytes() == (tmp_path / "c.txt").read_bytes()


def label_fit(labels, n_communities, n_attrs=2, noise=0.0):
    n = len(labels)
    T = np.full((n, n_communities), noise)
    T[np.arange(n), labels] += 1.0
    params = ModelParams(normalize_rows(T), np.full((n_communities, n), 1 / n),
                         np.full((n_communities, n_attrs), 1 / n_attrs))
    return FitResult(params, (-1.0,), True, 1)


def test_eval_planted_labels_give_nmi_one(generated, tmp_path, capsys):
    d = sorted(generated.iterdir())[0]
    labels = io.load_labels(d / "labels.tsv")
    io.save_fit(label_fit(labels.labels, labels.n_communities), tmp_path / "fit.txt")
    rc = main(["eval", str(tmp_path / "fit.txt"), str(d / "labels.tsv"),
               "--graph", str(d / "edges.tsv")])
    out = capsys.readouterr().out
    assert rc == 0 and "nmi=1.0000" in out and "modularity=" in out


def test_eval_size_mismatch(generated, tmp_path, capsys):
    d = sorted(generated.iterdir())[0]
    io.save_fit(label_fit(np.array([0, 1, 1]), 2), tmp_path / "fit.txt")
    assert main(["eval", str(tmp_path / "fit.txt"), str(d / "labels.tsv")]) == 1
    assert "nodes" in capsys.readouterr().err


def test_eval_directory_reports_mean_and_stddev(tmp_path, capsys):
    truth = np.array([0, 0, 0, 1, 1, 1, 2, 2, 2])
    io.save_labels(Partition(truth, 3), tmp_path / "labels.tsv")
    runs = tmp_path / "runs"
    runs.mkdir()
    preds = [truth, np.array([0, 0, 1, 1, 1, 1, 2, 2, 2]), np.array([0, 1, 2, 0, 1, 2, 0, 1, 2])]
    for k, p in enumerate(preds):
        io.save_fit(label_fit(p, 3), runs / f"fit_{k}.txt")
    assert main(["eval", str(runs), str(tmp_path / "labels.tsv")]) == 0
    out = capsys.readouterr().out.splitlines()
    scores = [float(line.split("nmi=")[1]) for line in out[:3]]
    assert scores[0] == 1.0 and scores[2] == 0.0
    summary = out[-1]
    assert summary.startswith("nmi mean=")
    mean = float(summary.split("mean=")[1].split()[0])
    sd = float(summary.split("stddev=")[1].split()[0])
    assert mean == pytest.approx(np.mean(scores), abs=1e-4)
    assert sd == pytest.approx(np.std(scores, ddof=1), abs=1e-4)


def test_benchmark_empty_sweep(tmp_path, capsys):
    spec = tmp_path / "empty.spec"
    spec.write_text("regime = community\nsizes = 10, 10\nomega =\n")
    assert main(["benchmark", str(spec), "--out", str(tmp_path / "o")]) == 1
    assert "empty sweep" in capsys.readouterr().err


def test_benchmark_writes_curves(tmp_path):
    spec = tmp_path / "tiny.spec"
    spec.write_text("regime = community\nsizes = 20, 20\nlambda = 0.05\nomega = 0.05, 0.4\n"
                    "p_strong = 0.9\nstrong_per_block = 3\nmodes = both, links\n"
                    "repetitions = 2\nrestarts = 2\nmax_iters = 50\n")
    args = ["benchmark", str(spec), "--seed", "3"]
    assert main(args + ["--out", str(tmp_path / "a")]) == 0
    assert main(args + ["--out", str(tmp_path / "b"), "--threads", "3"]) == 0
    assert tree(tmp_path / "a") == tree(tmp_path / "b")
    assert {p.name for p in (tmp_path / "a").iterdir()} == \
        {"curve_p0.9_both.csv", "curve_p0.9_links.csv", "runs.csv"}
    curve = io.load_curve(tmp_path / "a" / "curve_p0.9_both.csv")
    assert [x for x, _, _ in curve] == [0.05, 0.4]
    assert curve[1][1] == 1.0


def inspect_fit(tmp_path, profile):
    c = profile.shape[0]
    params = ModelParams(np.full((4, c), 1 / c), np.full((c, 4), 0.25), profile)
    io.save_fit(FitResult(params, (-1.0,), True, 1), tmp_path / "fit.txt")
    return str(tmp_path / "fit.txt")


def test_inspect_uniform_profile_has_no_bold(tmp_path, capsys):
    assert main(["inspect", inspect_fit(tmp_path, np.full((2, 20), 0.05))]) == 0
    assert "*" not in capsys.readouterr().out


def test_inspect_threshold_and_names(tmp_path, capsys):
    f = inspect_fit(tmp_path, np.array([[0.5, 0.3, 0.15, 0.05]]))
    names = tmp_path / "names.txt"
    names.write_text("alpha\nbeta\ngamma\ndelta\n")
    main(["inspect", f, "--names", str(names)])
    bold = [ln for ln in capsys.readouterr().out.splitlines() if "*" in ln]
    assert len(bold) == 3 and "alpha" in bold[0] and "gamma" in bold[2]
    main(["inspect", f, "--names", str(names), "--threshold", "0.2"])
    bold = [ln for ln in capsys.readouterr().out.splitlines() if "*" in ln]
    assert len(bold) == 2
    names.write_text("alpha\n")
    assert main(["inspect", f, "--names", str(names)]) == 1


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "gnan", "--help"], capture_output=True, text=True)
    assert r.returncode == 0
    for cmd in ("generate", "fit", "eval", "benchmark", "inspect"):
        assert cmd in r.stdout
