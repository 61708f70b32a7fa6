"""Compare an ellipse with the tangent disk of diameter 2 at every sample
and colour the samples by class."""

import sys
from collections import Counter
from pathlib import Path

from mizel import ClassificationParams, Scene, classify_curve, generate_ellipse, render_svg

out = Path(sys.argv[1] if len(sys.argv) > 1 else "demo_out")
out.mkdir(exist_ok=True)

c = generate_ellipse(2.0, 1.0, 2048)
rep = classify_curve(c, ClassificationParams.for_curve(c, 2.0))
print("counts:", dict(Counter(lab.value for lab in rep.labels)))
# the mixed labels sit where the curvature crosses 1, i.e. between the A caps and the B flanks
mixed = [i for i, lab in enumerate(rep.labels) if lab.value in ("AB", "BA")]
print("mixed samples at", [tuple(round(float(v), 3) for v in c.points[i]) for i in mixed])
scene = Scene(title="tangent-disk classes")
scene.add_curve(c.points)
scene.add_classified_points(c.points, rep.labels)
print("wrote", render_svg(scene, out / "ellipse_classes.svg"))
