import argparse
import logging
import os

import numpy as np

from .io_idx import write_idx

logger = logging.getLogger(__name__)

IMAGE_SIZE = 8

GLYPHS = {
    0: ["..###...",
        ".#...#..",
        ".#..##..",
        ".#.#.#..",
        ".##..#..",
        ".#...#..",
        "..###...",
        "........"],
    1: ["...#....",
        "..##....",
        "...#....",
        "...#....",
        "...#....",
        "...#....",
        "..###...",
        "........"],
    2: ["..###...",
        ".#...#..",
        ".....#..",
        "....#...",
        "...#....",
        "..#.....",
        ".#####..",
        "........"],
    3: [".####...",
        ".....#..",
        ".....#..",
        "..###...",
        ".....#..",
        ".....#..",
        ".####...",
        "........"],
    4: ["....#...",
        "...##...",
        "..#.#...",
        ".#..#...",
        ".#####..",
        "....#...",
        "....#...",
        "........"],
    5: [".#####..",
        ".#......",
        ".####...",
        ".....#..",
        ".....#..",
        ".#...#..",
        "..###...",
        "........"],
    6: ["...##...",
        "..#.....",
        ".#......",
        ".####...",
        ".#...#..",
        ".#...#..",
        "..###...",
        "........"],
    7: [".#####..",
        ".....#..",
        "....#...",
        "...#....",
        "..#.....",
        "..#.....",
        "..#.....",
        "........"],
    8: ["..###...",
        ".#...#..",
        ".#...#..",
        "..###...",
        ".#...#..",
        ".#...#..",
        "..###...",
        "........"],
    9: ["..###...",
        ".#...#..",
        ".#...#..",
        "..####..",
        ".....#..",
        "....#...",
        "..##....",
        "........"],
}


def glyph(digit):
    rows = GLYPHS[digit]
    return np.array([[c == '#' for c in row] for row in rows],
                    dtype=np.float64)


def shift_image(img, dy, dx):
    """Translate with zero fill (no wrap-around)."""
    out = np.zeros_like(img)
    h, w = img.shape
    ys, yd = (slice(0, h - dy), slice(dy, h)) if dy >= 0 else \
        (slice(-dy, h), slice(0, h + dy))
    xs, xd = (slice(0, w - dx), slice(dx, w)) if dx >= 0 else \
        (slice(-dx, w), slice(0, w + dx))
    out[yd, xd] = img[ys, xs]
    return out


def make_digits(n, seed, noise=24.0, max_shift=1):
    """Desk-scale digit set: 8x8 uint8 glyphs with seeded jitter.

    Each sample is a digit glyph shifted by up to max_shift pixels, drawn
    with a random stroke intensity and a faint background, plus Gaussian
    pixel noise. Labels cycle through all classes before shuffling, so
    classes are balanced.
    """
    rng = np.random.default_rng(seed)
    labels = rng.permutation(np.arange(n) % 10).astype(np.uint8)
    images = np.empty((n, IMAGE_SIZE, IMAGE_SIZE), dtype=np.uint8)
    templates = {d: glyph(d) for d in range(10)}
    for i, label in enumerate(labels):
        dy, dx = rng.integers(-max_shift, max_shift + 1, size=2)
        img = shift_image(templates[int(label)], int(dy), int(dx))
        stroke = rng.uniform(160.0, 255.0)
        background = rng.uniform(0.0, 40.0)
        img = background + (stroke - background) * img
        img += rng.normal(0.0, noise, size=img.shape)
        images[i] = np.clip(np.rint(img), 0, 255).astype(np.uint8)
    return images, labels


def write_digits(out_dir, n, seed, prefix="digits"):
    os.makedirs(out_dir, exist_ok=True)
    images, labels = make_digits(n, seed)
    images_file = os.path.join(out_dir, prefix + "-images.idx")
    labels_file = os.path.join(out_dir, prefix + "-labels.idx")
    write_idx(images_file, images)
    write_idx(labels_file, labels)
    logger.info("wrote %d digits to %s", n, out_dir)
    return images_file, labels_file


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument('--out-dir', type=str, dest='out_dir',
                        help='output folder', required=True)
    parser.add_argument('-n', type=int, default=3000,
                        help='number of samples')
    parser.add_argument('--seed', type=int, default=0)
    args = parser.parse_args()
    logging.basicConfig(level=logging.INFO)
    write_digits(args.out_dir, args.n, args.seed)


if __name__ == "__main__":
    main()
