"""Look for a circle meeting a set in exactly three points. An ellipse has
many; a circle has none; the packing remainder admits only 0, 1 or
infinitely many."""

from mizel import (Circle, CompactSetK, Point2, exactly_m_search, generate_circle, generate_ellipse,
                   greedy_circle_packing)

K = CompactSetK(greedy_circle_packing(Circle(Point2(0.0, 0.0), 1.0), 0.01, 64, seed=42))
targets = {"ellipse 2x1": generate_ellipse(2.0, 1.0, 4096), "unit circle": generate_circle(1.0, 1024),
           "packing remainder": K}
for name, t in targets.items():
    res = exactly_m_search(t, 3, budget=2000, seed=0)
    print(f"{name:18s} {res.describe()}")
    if res.found:
        p = res.probe
        print(f"{'':18s} probe centre ({p.center.x:.4f}, {p.center.y:.4f}) radius {p.radius:.4f}")
