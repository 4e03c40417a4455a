#!/usr/bin/env python3
"""Convert a raw Planetoid dataset (ind.<name>.{x,y,tx,ty,allx,ally,graph,test.index})
into the tgs dataset directory layout (see docs/dataset_format.md).

The standard split is kept: the first |y| nodes train, the next 500 validate,
test.index holds the 1000 test nodes. Test indices missing from the raw files
(Citeseer) become isolated, unlabeled rows with zero features.

    python3 tools/planetoid_to_tgs.py --raw planetoid/data --name cora --out data/cora
"""

import argparse
import pickle
import sys
from pathlib import Path

import numpy as np
import scipy.sparse as sp


def load_pickle(path):
    with open(path, "rb") as f:
        return pickle.load(f, encoding="latin1")


def load_planetoid(raw: Path, name: str):
    parts = {k: load_pickle(raw / f"ind.{name}.{k}") for k in ("x", "y", "tx", "ty", "allx", "ally", "graph")}
    test_index = [int(line) for line in (raw / f"ind.{name}.test.index").read_text().split()]
    test_sorted = np.sort(test_index)

    tx, ty = parts["tx"], parts["ty"]
    full_range = range(test_sorted[0], test_sorted[-1] + 1)
    if len(full_range) != tx.shape[0]:
        # fill the gaps left by isolated test nodes
        tx_ext = sp.lil_matrix((len(full_range), tx.shape[1]))
        tx_ext[test_sorted - test_sorted[0], :] = tx
        tx = tx_ext
        ty_ext = np.zeros((len(full_range), ty.shape[1]))
        ty_ext[test_sorted - test_sorted[0], :] = ty
        ty = ty_ext

    features = sp.vstack((parts["allx"], tx)).tolil()
    features[test_index, :] = features[test_sorted, :]
    labels_onehot = np.vstack((parts["ally"], ty))
    labels_onehot[test_index, :] = labels_onehot[test_sorted, :]

    labels = np.where(labels_onehot.sum(axis=1) > 0, labels_onehot.argmax(axis=1), -1)
    n = features.shape[0]
    edges = set()
    for u, nbrs in parts["graph"].items():
        for v in nbrs:
            if u != v and u < n and v < n:
                edges.add((min(u, v), max(u, v)))

    n_train = parts["y"].shape[0]
    train = list(range(n_train))
    val = list(range(n_train, n_train + min(500, max(0, test_sorted[0] - n_train))))
    test = sorted(test_index)
    return features.tocsr(), labels, sorted(edges), train, val, test


def write_tgs(out: Path, features, labels, edges, train, val, test, csv: bool):
    out.mkdir(parents=True, exist_ok=True)
    n, d = features.shape
    classes = int(labels.max()) + 1
    (out / "header.txt").write_text(f"# converted from Planetoid\nnodes {n}\nfeatures {d}\nclasses {classes}\n")
    dense = np.asarray(features.todense(), dtype="<f8")
    for stale in ("features.bin", "features.csv"):
        (out / stale).unlink(missing_ok=True)
    if csv:
        np.savetxt(out / "features.csv", dense, delimiter=",", fmt="%.17g")
    else:
        dense.tofile(out / "features.bin")
    (out / "edges.txt").write_text("".join(f"{u} {v}\n" for u, v in edges))
    (out / "labels.txt").write_text("".join(f"{int(y)}\n" for y in labels))
    for fname, ids in (("train.txt", train), ("val.txt", val), ("test.txt", test)):
        (out / fname).write_text("".join(f"{i}\n" for i in ids))
    return n, d, classes


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--raw", required=True, type=Path, help="directory holding the ind.<name>.* files")
    ap.add_argument("--name", required=True, help="cora, citeseer or pubmed")
    ap.add_argument("--out", required=True, type=Path)
    ap.add_argument("--csv", action="store_true", help="write features.csv instead of features.bin")
    args = ap.parse_args(argv)

    try:
        data = load_planetoid(args.raw, args.name)
    except FileNotFoundError as e:
        print(f"missing raw file: {e.filename}", file=sys.stderr)
        return 2
    n, d, c = write_tgs(args.out, *data, csv=args.csv)
    print(f"{args.out}: {n} nodes, {len(data[2])} edges, {d} features, {c} classes")
    return 0


if __name__ == "__main__":
    sys.exit(main())
