"""Builds a toy Planetoid dump with a gap in test.index, converts it and loads it with `tgs validate`."""

import pickle
import subprocess
import sys
import tempfile
from pathlib import Path

import numpy as np
import scipy.sparse as sp

TGS, CONVERTER = sys.argv[1], sys.argv[2]
rng = np.random.default_rng(0)
C, D = 3, 6


def onehot(k):
    m = np.zeros((k, C))
    m[np.arange(k), rng.integers(0, C, k)] = 1
    return m


with tempfile.TemporaryDirectory() as tmp:
    raw = Path(tmp)
    allx = sp.csr_matrix((rng.random((30, D)) > 0.5).astype(float))
    ally = onehot(30)
    test = [31, 30, 33, 32, 34, 36, 37, 38, 39]  # node 35 missing
    parts = dict(x=allx[:6], y=ally[:6], tx=sp.csr_matrix(rng.random((9, D))), ty=onehot(9), allx=allx, ally=ally,
                 graph={i: [(i + 1) % 40, (i + 7) % 40, i] for i in range(40)})
    for key, value in parts.items():
        with open(raw / f"ind.toy.{key}", "wb") as f:
            pickle.dump(value, f)
    (raw / "ind.toy.test.index").write_text("\n".join(map(str, test)))

    out = raw / "out"
    subprocess.run([sys.executable, CONVERTER, "--raw", str(raw), "--name", "toy", "--out", str(out)], check=True)
    labels = [int(v) for v in (out / "labels.txt").read_text().split()]
    assert len(labels) == 40 and labels[35] == -1, labels
    assert (out / "train.txt").read_text().split() == [str(i) for i in range(6)]
    assert sorted(map(int, (out / "test.txt").read_text().split())) == sorted(test)
    dense = np.fromfile(out / "features.bin", dtype="<f8").reshape(40, D)
    # tx row k belongs to node test.index[k]
    for k, node in enumerate(test):
        assert np.allclose(dense[node], parts["tx"].toarray()[k]), node
    assert not dense[35].any()
    report = subprocess.run([TGS, "validate", "--dataset", str(out)], capture_output=True, text=True, check=True).stdout
    assert "nodes       40" in report and "edges       80" in report, report
    print("planetoid round trip ok")
