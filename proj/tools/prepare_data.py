#!/usr/bin/env python3
"""Convert public graph datasets into the plain-text layout read by mtgae_cli.

Planetoid citation data (cora, citeseer, pubmed) is read from the usual
ind.<name>.{x,tx,allx,y,ty,ally,graph,test.index} files; the SNAP arXiv GR-QC
collaboration list is read from CA-GrQc.txt. Output files:

    <out>/edges.txt     "u v" per undirected edge
    <out>/features.txt  "node feature value" triples
    <out>/labels.txt    "node class" per labeled node

Downloading is left to the user.
"""

import argparse
import pickle
import sys
from pathlib import Path

import numpy as np
import scipy.sparse as sp

PLANETOID_PARTS = ("x", "y", "tx", "ty", "allx", "ally", "graph")


def load_pickle(path):
    with open(path, "rb") as f:
        return pickle.load(f, encoding="latin1")


def load_planetoid(src, name):
    parts = {p: load_pickle(src / f"ind.{name}.{p}") for p in PLANETOID_PARTS}
    test_index = [int(line) for line in (src / f"ind.{name}.test.index").read_text().split()]
    test_sorted = np.sort(test_index)

    tx, ty = parts["tx"], parts["ty"]
    # Some test ids (citeseer) have no features; pad the test block so row
    # positions line up with ids, leaving those nodes featureless and unlabeled.
    lo, hi = test_sorted[0], test_sorted[-1]
    if hi - lo + 1 != tx.shape[0]:
        full_tx = sp.lil_matrix((hi - lo + 1, tx.shape[1]))
        full_tx[test_sorted - lo, :] = tx
        tx = full_tx
        full_ty = np.zeros((hi - lo + 1, ty.shape[1]))
        full_ty[test_sorted - lo, :] = ty
        ty = full_ty

    features = sp.vstack([sp.csr_matrix(parts["allx"]), sp.csr_matrix(tx)]).tolil()
    features[test_index, :] = features[test_sorted, :]
    onehot = np.vstack([parts["ally"], ty])
    onehot[test_index, :] = onehot[test_sorted, :]

    n = features.shape[0]
    edges = set()
    for u, neighbors in parts["graph"].items():
        for v in neighbors:
            if u != v:
                edges.add((min(u, v), max(u, v)))
    n = max(n, 1 + max(max(e) for e in edges))
    labels = {i: int(np.argmax(row)) for i, row in enumerate(onehot) if row.sum() > 0}
    return n, sorted(edges), features.tocsr(), labels


def write_edges(path, edges, n):
    covered = {u for e in edges for u in e}
    with open(path, "w") as f:
        for u, v in edges:
            f.write(f"{u} {v}\n")
        # A self-loop line keeps an isolated node in the node count.
        for u in range(n):
            if u not in covered:
                f.write(f"{u} {u}\n")


def write_features(path, features, n):
    features = features.tocsr()
    with open(path, "w") as f:
        for i in range(n):
            row = features.getrow(i) if i < features.shape[0] else sp.csr_matrix((1, features.shape[1]))
            if row.nnz == 0:
                # Keeps the node (and the full width) visible to the reader.
                f.write(f"{i} {features.shape[1] - 1} 0\n")
            for j, value in zip(row.indices, row.data):
                f.write(f"{i} {j} {value:g}\n")


def write_labels(path, labels):
    with open(path, "w") as f:
        for node in sorted(labels):
            f.write(f"{node} {labels[node]}\n")


def load_grqc(path):
    ids = {}
    edges = set()
    for line in Path(path).read_text().splitlines():
        if not line.strip() or line.startswith("#"):
            continue
        a, b = line.split()[:2]
        u = ids.setdefault(a, len(ids))
        v = ids.setdefault(b, len(ids))
        if u != v:
            edges.add((min(u, v), max(u, v)))
    return len(ids), sorted(edges)


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="kind", required=True)
    p = sub.add_parser("planetoid", help="cora, citeseer or pubmed")
    p.add_argument("--name", required=True, choices=["cora", "citeseer", "pubmed"])
    p.add_argument("--src", required=True, type=Path, help="directory with the ind.<name>.* files")
    p.add_argument("--out", required=True, type=Path)
    g = sub.add_parser("grqc", help="SNAP CA-GrQc edge list")
    g.add_argument("--src", required=True, type=Path, help="CA-GrQc.txt")
    g.add_argument("--out", required=True, type=Path)
    args = parser.parse_args(argv)

    args.out.mkdir(parents=True, exist_ok=True)
    if args.kind == "planetoid":
        n, edges, features, labels = load_planetoid(args.src, args.name)
        write_edges(args.out / "edges.txt", edges, n)
        write_features(args.out / "features.txt", features, n)
        write_labels(args.out / "labels.txt", labels)
        print(f"{args.name}: {n} nodes, {len(edges)} edges, {features.shape[1]} features, "
              f"{len(labels)} labeled", file=sys.stderr)
    else:
        n, edges = load_grqc(args.src)
        write_edges(args.out / "edges.txt", edges, n)
        print(f"arxiv-grqc: {n} nodes, {len(edges)} edges", file=sys.stderr)


if __name__ == "__main__":
    main()
