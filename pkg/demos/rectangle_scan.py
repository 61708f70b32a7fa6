"""Scan a circle and a Reuleaux triangle for near-rectangles with three
vertices on the curve, and draw the strongest Reuleaux witness."""

import sys
from pathlib import Path

from mizel import Scene, generate_circle, generate_reuleaux, render_svg, scan_curve

out = Path(sys.argv[1] if len(sys.argv) > 1 else "demo_out")
out.mkdir(exist_ok=True)

for name, curve in (("circle", generate_circle(0.5, 1024)), ("reuleaux", generate_reuleaux(3, 1.0, 1024))):
    rep = scan_curve(curve, diagonal=1.0, max_short_side=0.15)
    print(f"{name:9s} {rep.summary()}")

rep = scan_curve(generate_reuleaux(3, 1.0, 1024), diagonal=1.0, max_short_side=0.15)
k = int(rep.arrays["fourth_distance"].argmax())
w = rep.witness(k)
print(f"strongest witness: fourth vertex {w.fourth} lies {w.fourth_distance:.4f} off the curve "
      f"({w.fourth_distance / rep.membership_tol:.1f} x tolerance)")
scene = Scene(title="Reuleaux witness")
scene.add_curve(generate_reuleaux(3, 1.0, 1024).points)
scene.add_witness(w.a, w.b, w.c, w.fourth)
print("wrote", render_svg(scene, out / "reuleaux_witness.svg"))
