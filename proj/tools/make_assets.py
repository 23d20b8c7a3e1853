#!/usr/bin/env python3
"""Regenerates the sample images and blur kernels under data/.

Images are grayscale crops of scikit-image sample photographs (CC0 / public
domain). Kernels are synthetic camera-shake trajectories rendered on odd
grids. Output is deterministic.
"""
import argparse
import pathlib

import numpy as np
from skimage import color, data, transform


def gray(img):
    if img.ndim == 3:
        img = color.rgb2gray(img[..., :3])
    else:
        img = img.astype(np.float64) / 255.0
    return img


def half(img):
    return transform.rescale(img, 0.5, anti_aliasing=True)


def write_pgm(path, img):
    q = np.clip(np.floor(img * 255.0 + 0.5), 0, 255).astype(np.uint8)
    h, w = q.shape
    with open(path, "wb") as f:
        f.write(b"P5\n%d %d\n255\n" % (w, h))
        f.write(q.tobytes())


def crop(img, top, left, size):
    return img[top:top + size, left:left + size]


def motion_kernel(size, seed, steps=4000):
    rng = np.random.default_rng(seed)
    pos = np.zeros(2)
    vel = rng.normal(size=2)
    vel /= np.linalg.norm(vel)
    pts = []
    for _ in range(steps):
        vel += 0.08 * rng.normal(size=2)
        vel /= np.linalg.norm(vel)
        pos += 0.01 * vel
        pts.append(pos.copy())
    pts = np.array(pts)
    pts -= pts.mean(axis=0)
    extent = np.abs(pts).max()
    radius = size // 2
    pts *= (radius - 1.5) / extent
    k = np.zeros((size, size))
    for y, x in pts:
        fy, fx = y + radius, x + radius
        iy, ix = int(np.floor(fy)), int(np.floor(fx))
        ay, ax = fy - iy, fx - ix
        for dy, wy in ((0, 1 - ay), (1, ay)):
            for dx, wx in ((0, 1 - ax), (1, ax)):
                k[iy + dy, ix + dx] += wy * wx
    # mild optical blur on the trajectory
    g = np.array([0.25, 0.5, 0.25])
    k = np.apply_along_axis(lambda r: np.convolve(r, g, mode="same"), 0, k)
    k = np.apply_along_axis(lambda r: np.convolve(r, g, mode="same"), 1, k)
    return k / k.sum()


def write_kernel(path, k):
    with open(path, "w") as f:
        f.write("%d %d\n" % k.shape)
        for row in k:
            f.write(" ".join("%.8f" % v for v in row) + "\n")


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default=str(pathlib.Path(__file__).resolve().parents[1] / "data"))
    out = pathlib.Path(ap.parse_args().out)
    (out / "train").mkdir(parents=True, exist_ok=True)
    (out / "test").mkdir(parents=True, exist_ok=True)
    (out / "kernels").mkdir(parents=True, exist_ok=True)

    train = {
        "astronaut": (half(gray(data.astronaut())), 20, 40),
        "coffee": (half(gray(data.coffee())), 40, 100),
        "chelsea": (half(gray(data.chelsea())), 10, 60),
        "brick": (half(gray(data.brick())), 60, 60),
    }
    for name, (img, top, left) in train.items():
        write_pgm(out / "train" / f"{name}.pgm", crop(img, top, left, 128))

    cam = half(gray(data.camera()))
    coins = half(gray(data.coins()))
    write_pgm(out / "test" / "camera64.pgm", crop(cam, 40, 90, 64))
    write_pgm(out / "test" / "coins64.pgm", crop(coins, 40, 80, 64))
    write_pgm(out / "test" / "camera101.pgm", crop(cam, 20, 70, 101))
    write_pgm(out / "test" / "coins101.pgm", crop(coins, 20, 60, 101))

    write_kernel(out / "kernels" / "kernel1_17x17.txt", motion_kernel(17, 1))
    write_kernel(out / "kernels" / "kernel2_19x19.txt", motion_kernel(19, 2))


if __name__ == "__main__":
    main()
