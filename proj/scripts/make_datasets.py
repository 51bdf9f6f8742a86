#!/usr/bin/env python3
# Copyright 2026 The qsearch Authors.
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

"""Materialize the bundled datasets under data/.

iris.csv      UCI layout (4 numeric columns + species string, with header),
              taken from the copy shipped inside scikit-learn.
mnist/        a stratified 5,000-image MNIST training subset (500 per digit)
              written as gzip-compressed IDX files. The images come from the
              ``mnist_5k.csv.gz`` file bundled in the mlxtend wheel.

Usage: python scripts/make_datasets.py [--out data] [--mlxtend-wheel PATH]
"""
import argparse
import gzip
import io
import pathlib
import struct
import subprocess
import sys
import tempfile
import zipfile

import numpy as np


def write_iris(out: pathlib.Path) -> None:
    from sklearn.datasets import load_iris

    bunch = load_iris()
    names = [f"Iris-{n}" for n in bunch.target_names]
    with open(out / "iris.csv", "w") as f:
        f.write("sepal_length,sepal_width,petal_length,petal_width,species\n")
        for row, label in zip(bunch.data, bunch.target):
            f.write(",".join(f"{v:.1f}" for v in row) + f",{names[label]}\n")


def _find_wheel(explicit):
    if explicit:
        return pathlib.Path(explicit)
    tmp = pathlib.Path(tempfile.mkdtemp())
    subprocess.check_call([sys.executable, "-m", "pip", "download", "--no-deps",
                           "-q", "-d", str(tmp), "mlxtend"])
    return next(tmp.glob("mlxtend-*.whl"))


def write_idx_gz(path: pathlib.Path, magic: int, dims, payload: bytes) -> None:
    header = struct.pack(">I", magic) + b"".join(struct.pack(">I", d) for d in dims)
    with gzip.GzipFile(path, "wb", mtime=0) as f:
        f.write(header + payload)


def write_mnist(out: pathlib.Path, wheel: pathlib.Path) -> None:
    with zipfile.ZipFile(wheel) as z:
        raw = z.read("mlxtend/data/data/mnist_5k.csv.gz")
    table = np.loadtxt(io.BytesIO(gzip.decompress(raw)), delimiter=",")
    images = table[:, :-1].astype(np.uint8)
    labels = table[:, -1].astype(np.uint8)
    dest = out / "mnist"
    dest.mkdir(parents=True, exist_ok=True)
    write_idx_gz(dest / "train-images-idx3-ubyte.gz", 0x803, (len(images), 28, 28),
                 images.tobytes())
    write_idx_gz(dest / "train-labels-idx1-ubyte.gz", 0x801, (len(labels),),
                 labels.tobytes())


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default=str(pathlib.Path(__file__).resolve().parent.parent / "data"))
    ap.add_argument("--mlxtend-wheel")
    args = ap.parse_args()
    out = pathlib.Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_iris(out)
    write_mnist(out, _find_wheel(args.mlxtend_wheel))


if __name__ == "__main__":
    main()
