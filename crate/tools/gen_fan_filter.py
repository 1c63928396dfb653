#!/usr/bin/env python3
"""Regenerate the default directional (fan) filter asset.

Builds the order-4 diamond maximally flat filter, maps the 1D ladder
lowpass through it with a McClellan transform, normalizes to unit DC gain
and modulates by (-1)^n along the first axis so the passband becomes the
fan |xi_1| > |xi_2|.

Usage: python3 tools/gen_fan_filter.py > crates/core/assets/fan_dmaxflat4.txt
"""
import hashlib
import sys

import numpy as np


def diamond_maxflat4():
    q = np.array(
        [
            [0, -5, 0, -3, 0],
            [-5, 0, 52, 0, 34],
            [0, 52, 0, -276, 0],
            [-3, 0, -276, 0, 1454],
            [0, 34, 0, 1454, 0],
        ],
        dtype=float,
    ) / 2.0**12
    h = np.hstack([q, np.fliplr(q[:, :-1])])
    h = np.vstack([h, np.flipud(h[:-1, :])])
    h[4, 4] = 0.0
    return h


def conv2_full(a, b):
    out = np.zeros((a.shape[0] + b.shape[0] - 1, a.shape[1] + b.shape[1] - 1))
    for i in range(b.shape[0]):
        for j in range(b.shape[1]):
            out[i : i + a.shape[0], j : j + a.shape[1]] += b[i, j] * a
    return out


def mcclellan(b1d, t):
    """H = sum_n a_n T_n(t) with a_0 = b[c], a_n = 2 b[c+n]."""
    n = (len(b1d) - 1) // 2
    a = [b1d[n]] + [2.0 * b1d[n + i] for i in range(1, n + 1)]
    inset = (t.shape[0] - 1) // 2
    size = 2 * n * inset + 1
    c = size // 2
    out = np.zeros((size, size))
    p_prev = np.zeros((1, 1))
    p_prev[0, 0] = 1.0
    p_cur = t.copy()

    def add(dst, src, coef):
        r = (src.shape[0] - 1) // 2
        dst[c - r : c + r + 1, c - r : c + r + 1] += coef * src

    add(out, p_prev, a[0])
    add(out, p_cur, a[1])
    for i in range(2, n + 1):
        p_next = 2.0 * conv2_full(t, p_cur)
        r = (p_prev.shape[0] - 1) // 2
        m = (p_next.shape[0] - 1) // 2
        p_next[m - r : m + r + 1, m - r : m + r + 1] -= p_prev
        add(out, p_next, a[i])
        p_prev, p_cur = p_cur, p_next
    return out


def fan_filter():
    m1 = 1.0 / np.sqrt(2.0)
    k1 = 1.0 - np.sqrt(2.0)
    k2 = m1
    k3 = k1
    half = np.array([0.25 * k2 * k3, 0.5 * k2, 1.0 + 0.5 * k2 * k3]) * m1
    ladder = np.concatenate([half, half[:-1][::-1]])
    h0 = mcclellan(ladder, diamond_maxflat4())
    h0 = np.sqrt(2.0) * h0 / h0.sum()
    p = h0 / np.sqrt(2.0)
    n = np.arange(p.shape[0]) - p.shape[0] // 2
    return p * ((-1.0) ** n)[:, None] + 0.0


def main():
    p = fan_filter()
    rows, cols = p.shape
    lines = ["%d %d %d %d" % (rows, cols, rows // 2, cols // 2)]
    for r in range(rows):
        lines.append(" ".join(repr(float(v)) for v in p[r]))
    text = "\n".join(lines) + "\n"
    sys.stdout.write(text)
    sys.stderr.write("sha256 %s\n" % hashlib.sha256(text.encode()).hexdigest())


if __name__ == "__main__":
    main()
