"""Constant width in practice: Barbier perimeters of Reuleaux polygons and
the caliper width of a Fourier curve against an ellipse."""

import math

import numpy as np

from mizel import generate_ellipse, generate_fourier_cw, generate_reuleaux, perimeter, width_function

for k in (3, 5, 7, 9):
    c = generate_reuleaux(k, 1.0, 2 ** 14)
    print(f"Reuleaux {k}-gon: perimeter / pi = {perimeter(c) / math.pi:.7f}")

for name, c in (("fourier a3=0.05", generate_fourier_cw(1.0, {3: 0.05}, 4096)),
                ("ellipse 2x1", generate_ellipse(1.0, 0.5, 4096))):
    _, w = width_function(c, 720)
    print(f"{name:16s} width in [{w.min():.6f}, {w.max():.6f}]")

c = generate_fourier_cw(1.0, {3: 0.05}, 4096)
h = c.body.h
print("opposite support values sum to 1 exactly:", bool(np.all(h[: len(h) // 2] + h[len(h) // 2:] == 1.0)))
