#!/usr/bin/env python3
"""Convert a MATLAB .mat (or .npy) hyperspectral array to a bandsel container cube.

The public benchmark scenes ship as H x W x B arrays (cubes) and H x W integer
arrays (ground truth). Pixel (x, y) becomes index y * W + x.

  mat_to_container.py Salinas_corrected.mat data/salinas_a.cube --crop 591:676,157:243
  mat_to_container.py SalinasA_gt.mat data/salinas_a_gt.cube
"""
import argparse
import json
import sys

import numpy as np


def load_array(path, key):
    if path.endswith(".npy"):
        return np.load(path)
    from scipy.io import loadmat

    mat = loadmat(path)
    names = [k for k in mat if not k.startswith("__")]
    if key is None:
        if len(names) != 1:
            sys.exit(f"{path}: pick one of {names} with --key")
        key = names[0]
    return np.asarray(mat[key])


def parse_crop(text):
    rows, cols = text.split(",")
    r0, r1 = (int(v) for v in rows.split(":"))
    c0, c1 = (int(v) for v in cols.split(":"))
    return slice(r0, r1), slice(c0, c1)


def write_container(arr, path, wavelengths=None):
    if arr.ndim == 2:
        arr = arr[:, :, None]
    if arr.ndim != 3:
        sys.exit(f"expected a 2-D or 3-D array, got shape {arr.shape}")
    height, width, bands = arr.shape
    header = {
        "format": "bandsel-cube",
        "version": 1,
        "width": width,
        "height": height,
        "bands": bands,
        "dtype": "f32",
        "layout": "bsq",
    }
    if wavelengths is not None:
        header["wavelengths"] = list(wavelengths)
    payload = np.ascontiguousarray(np.transpose(arr, (2, 0, 1)), dtype="<f4")
    with open(path, "wb") as out:
        out.write(json.dumps(header).encode() + b"\n")
        out.write(payload.tobytes())


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("input", help=".mat or .npy file")
    ap.add_argument("output", help="container cube to write")
    ap.add_argument("--key", help="variable name inside the .mat file")
    ap.add_argument("--crop", help="row0:row1,col0:col1 sub-window")
    ap.add_argument("--wavelengths", help="text file with one wavelength (nm) per band")
    args = ap.parse_args()

    arr = load_array(args.input, args.key)
    if args.crop:
        rows, cols = parse_crop(args.crop)
        arr = arr[rows, cols, ...]
    wl = None
    if args.wavelengths:
        wl = [float(v) for v in open(args.wavelengths).read().split()]
    write_container(arr.astype(np.float64), args.output, wl)
    print(f"{args.output}: {arr.shape[1]}x{arr.shape[0]}x{arr.shape[2] if arr.ndim == 3 else 1}")


if __name__ == "__main__":
    main()
