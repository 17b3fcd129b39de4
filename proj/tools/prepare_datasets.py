#!/usr/bin/env python3
# Copyright 2026 The FUSE Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Converts the Cora and CiteSeer copies shipped inside the `pgl` wheel into
the plain-text formats read by `fuse`.

Output per dataset directory:
  edges.tsv     one node declaration per line ("id"), then one edge per line
                ("u<TAB>v"); declarations pin internal ids to 0..n-1
  labels.csv    "node_id,class_id"
  features.csv  sparse "node_id,feature_index,value" triples
  classes.txt   class names in class-id order (Cora only)

Usage:
  python3 tools/prepare_datasets.py --out data            # fetches the wheel with pip
  python3 tools/prepare_datasets.py --wheel pgl.whl --out data
"""
import argparse
import glob
import io
import os
import pickle
import subprocess
import sys
import tempfile
import zipfile

import numpy as np

PGL_VERSION = "2.2.6"


def fetch_wheel(workdir):
    subprocess.check_call([
        sys.executable, "-m", "pip", "download", "--no-deps",
        f"pgl=={PGL_VERSION}", "-d", workdir,
    ])
    wheels = glob.glob(os.path.join(workdir, "pgl-*.whl"))
    if not wheels:
        sys.exit("pip did not produce a pgl wheel")
    return wheels[0]


def write_dataset(out_dir, n, edges, labels, features):
    os.makedirs(out_dir, exist_ok=True)
    with open(os.path.join(out_dir, "edges.tsv"), "w") as f:
        f.write(f"# {n} node declarations followed by {len(edges)} raw edge records\n")
        for i in range(n):
            f.write(f"{i}\n")
        for u, v in edges:
            f.write(f"{u}\t{v}\n")
    with open(os.path.join(out_dir, "labels.csv"), "w") as f:
        for i, c in enumerate(labels):
            if c >= 0:
                f.write(f"{i},{c}\n")
    rows, cols = np.nonzero(features)
    with open(os.path.join(out_dir, "features.csv"), "w") as f:
        for r, c in zip(rows, cols):
            v = features[r, c]
            f.write(f"{r},{c},{v:g}\n")


def convert_cora(zf, out_dir):
    content = zf.read("pgl/data/cora/cora.content").decode().splitlines()
    cites = zf.read("pgl/data/cora/cora.cites").decode().splitlines()
    ids, feats, names = [], [], []
    for line in content:
        parts = line.split()
        ids.append(parts[0])
        feats.append([float(x) for x in parts[1:-1]])
        names.append(parts[-1])
    classes = sorted(set(names))
    index = {pid: i for i, pid in enumerate(ids)}
    edges = []
    for line in cites:
        a, b = line.split()
        edges.append((index[a], index[b]))
    labels = [classes.index(c) for c in names]
    write_dataset(out_dir, len(ids), edges, labels, np.array(feats))
    with open(os.path.join(out_dir, "classes.txt"), "w") as f:
        f.write("\n".join(classes) + "\n")


def load_pickle(zf, name):
    data = zf.read(f"pgl/data/citeseer/ind.citeseer.{name}")
    return pickle.load(io.BytesIO(data), encoding="latin1")


def convert_citeseer(zf, out_dir):
    x, y, tx, ty, allx, ally, graph = (
        load_pickle(zf, k) for k in ("x", "y", "tx", "ty", "allx", "ally", "graph"))
    test_idx = [int(v) for v in
                zf.read("pgl/data/citeseer/ind.citeseer.test.index").decode().split()]
    test_sorted = sorted(test_idx)
    # Some test ids have no feature/label rows; they stay as unlabeled nodes.
    full_range = range(test_sorted[0], test_sorted[-1] + 1)
    tx_ext = np.zeros((len(full_range), tx.shape[1]))
    tx_ext[np.array(test_sorted) - test_sorted[0], :] = tx.toarray()
    ty_ext = np.zeros((len(full_range), ty.shape[1]))
    ty_ext[np.array(test_sorted) - test_sorted[0], :] = ty
    features = np.vstack([allx.toarray(), tx_ext])
    onehot = np.vstack([ally, ty_ext])
    features[test_idx, :] = features[test_sorted, :]
    onehot[test_idx, :] = onehot[test_sorted, :]
    n = features.shape[0]
    labels = [int(np.argmax(row)) if row.sum() > 0 else -1 for row in onehot]
    edges = []
    for u in sorted(graph):
        for v in graph[u]:
            edges.append((u, v))
    n = max(n, max(max(e) for e in edges) + 1)
    write_dataset(out_dir, n, edges, labels, features)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--wheel", help="path to a pgl wheel; fetched with pip if omitted")
    ap.add_argument("--out", default="data")
    args = ap.parse_args()
    with tempfile.TemporaryDirectory() as tmp:
        wheel = args.wheel or fetch_wheel(tmp)
        with zipfile.ZipFile(wheel) as zf:
            convert_cora(zf, os.path.join(args.out, "cora"))
            convert_citeseer(zf, os.path.join(args.out, "citeseer"))


if __name__ == "__main__":
    main()
