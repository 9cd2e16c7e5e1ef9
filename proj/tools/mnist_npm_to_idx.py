#!/usr/bin/env python3
"""Convert the digit samples shipped in the `mnist` npm package to IDX files.

The npm package (https://www.npmjs.com/package/mnist) carries 10,000 MNIST
digits as per-class JSON arrays of 784 floats in [0, 1]. This script rebuilds
byte pixels, interleaves the classes with a fixed shuffle, and writes a
standard IDX image/label pair that `penet` reads directly.

    npm pack mnist && tar xzf mnist-1.1.0.tgz
    python3 tools/mnist_npm_to_idx.py package data/mnist
"""

import argparse
import json
import pathlib
import random
import struct

PIXELS = 28 * 28


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("package", type=pathlib.Path, help="extracted npm package root")
    ap.add_argument("out", type=pathlib.Path, help="output directory")
    ap.add_argument("--seed", type=int, default=20190909)
    args = ap.parse_args()

    samples = []
    for digit in range(10):
        raw = json.loads((args.package / "src" / "digits" / f"{digit}.json").read_text())["data"]
        if len(raw) % PIXELS:
            raise SystemExit(f"{digit}.json: length {len(raw)} is not a multiple of {PIXELS}")
        for start in range(0, len(raw), PIXELS):
            pixels = bytes(int(round(v * 255.0)) for v in raw[start:start + PIXELS])
            samples.append((pixels, digit))

    random.Random(args.seed).shuffle(samples)

    args.out.mkdir(parents=True, exist_ok=True)
    with open(args.out / "digits-images-idx3-ubyte", "wb") as f:
        f.write(struct.pack(">IIII", 0x00000803, len(samples), 28, 28))
        for pixels, _ in samples:
            f.write(pixels)
    with open(args.out / "digits-labels-idx1-ubyte", "wb") as f:
        f.write(struct.pack(">II", 0x00000801, len(samples)))
        f.write(bytes(label for _, label in samples))
    print(f"wrote {len(samples)} samples to {args.out}")


if __name__ == "__main__":
    main()
