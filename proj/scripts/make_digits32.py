#!/usr/bin/env python3
# Copyright 2026 The cosup Authors
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
"""Builds the digits32 IDX files from the 5k MNIST subset shipped with mlxtend.

The csv has 785 columns per row: 784 pixel bytes (28x28, row-major) followed
by the label. Each image is zero-padded by 2 pixels on every side to 32x32 and
the set is split per class into 400 train / 100 test examples.

    python3 scripts/make_digits32.py --csv mnist_5k.csv.gz --out data/digits32
"""

import argparse
import gzip
import os
import struct

import numpy as np


def write_idx(path, array, magic):
    with gzip.GzipFile(path, "wb", mtime=0) as f:
        f.write(struct.pack(">I", magic))
        for d in array.shape:
            f.write(struct.pack(">I", d))
        f.write(array.astype(np.uint8).tobytes())


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--csv", required=True, help="mnist_5k.csv.gz from the mlxtend wheel")
    parser.add_argument("--out", required=True)
    parser.add_argument("--test-per-class", type=int, default=100)
    parser.add_argument("--seed", type=int, default=20220608)
    args = parser.parse_args()

    table = np.loadtxt(args.csv, delimiter=",", dtype=np.int64)
    pixels = table[:, :784].reshape(-1, 28, 28)
    labels = table[:, 784]
    padded = np.zeros((pixels.shape[0], 32, 32), dtype=np.uint8)
    padded[:, 2:30, 2:30] = pixels

    rng = np.random.default_rng(args.seed)
    train_idx, test_idx = [], []
    for c in range(10):
        idx = np.flatnonzero(labels == c)
        rng.shuffle(idx)
        test_idx.extend(idx[: args.test_per_class])
        train_idx.extend(idx[args.test_per_class:])
    train_idx = np.sort(np.array(train_idx))
    test_idx = np.sort(np.array(test_idx))

    os.makedirs(args.out, exist_ok=True)
    write_idx(os.path.join(args.out, "train-images-idx3-ubyte.gz"), padded[train_idx], 0x00000803)
    write_idx(os.path.join(args.out, "train-labels-idx1-ubyte.gz"), labels[train_idx], 0x00000801)
    write_idx(os.path.join(args.out, "test-images-idx3-ubyte.gz"), padded[test_idx], 0x00000803)
    write_idx(os.path.join(args.out, "test-labels-idx1-ubyte.gz"), labels[test_idx], 0x00000801)
    print(f"train={len(train_idx)} test={len(test_idx)}")


if __name__ == "__main__":
    main()
