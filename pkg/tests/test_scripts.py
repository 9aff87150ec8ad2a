import sys
from pathlib import Path

import numpy as np

from gnan import io

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "scripts"))
import convert_lazega  # noqa: E402
import convert_linqs  # noqa: E402


def test_convert_linqs(tmp_path):
    (tmp_path / "x.content").write_text("p9\t1\t0\t1\tAI\np3\t0\t0\t1\tDB\np5\t1\t1\t0\tAI\n")
    (tmp_path / "x.cites").write_text("p9\tp3\np3\tp5\nmissing\tp5\np3\tp5\n")
    ds = convert_linqs.convert(tmp_path / "x.content", tmp_path / "x.cites", tmp_path / "out")
    assert ds.graph.edges.tolist() == [[0, 1], [1, 0], [1, 2], [2, 1]]
    assert ds.attrs.to_dense().tolist() == [[1, 0, 1], [0, 0, 1], [1, 1, 0]]
    assert ds.labels.labels.tolist() == [0, 1, 0]
    back = io.load_dataset(tmp_path / "out")
    assert back.graph == ds.graph and back.attrs == ds.attrs
    assert (tmp_path / "out" / "class_names.txt").read_text() == "AI\nDB\n"


def test_convert_lazega(tmp_path):
    rng = np.random.default_rng(0)
    a = (rng.random((71, 71)) < 0.1).astype(int)
    a[43] = a[:, 43] = a[46] = a[:, 46] = 0
    np.savetxt(tmp_path / "f.dat", a, fmt="%d")
    attrs = np.column_stack([np.arange(1, 72), rng.integers(1, 3, 71), rng.integers(1, 3, 71),
                             rng.integers(1, 4, 71), rng.integers(1, 33, 71),
                             rng.integers(26, 68, 71), rng.integers(1, 3, 71),
                             rng.integers(1, 4, 71)])
    np.savetxt(tmp_path / "a.dat", attrs, fmt="%d")
    np.savetxt(tmp_path / "l.txt", rng.integers(1, 5, 69), fmt="%d")
    assert convert_lazega.main([str(tmp_path / p) for p in ("f.dat", "a.dat", "l.txt", "out")]) == 0
    ds = io.load_dataset(tmp_path / "out")
    assert ds.graph.n_nodes == 69 and ds.attrs.n_attrs == 18
    assert (ds.attrs.to_dense().sum(1) == 7).all()
    names = (tmp_path / "out" / "attr_names.txt").read_text().split()
    assert names[4:7] == ["office=1", "office=2", "office=3"]
