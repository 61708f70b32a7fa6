"""Pack 64 disks into the unit disk, remove them, and intersect the
remaining compact set with a few circles."""

from mizel import Circle, CompactSetK, Point2, greedy_circle_packing, probe_circle_intersection

pk = greedy_circle_packing(Circle(Point2(0.0, 0.0), 1.0), 0.01, 64, seed=42)
print(f"{len(pk.inner)} disks, coverage {pk.coverage():.3f}, violations {pk.violations()}")
K = CompactSetK(pk)
hole = pk.inner[0]
probes = {
    "outer boundary": pk.outer,
    "inside a hole": Circle(hole.center, 0.5 * hole.radius),
    "tangent inside a hole": Circle(Point2(hole.center.x + 0.5 * hole.radius, hole.center.y), 0.5 * hole.radius),
    "through the middle": Circle(Point2(0.1, -0.05), 0.45),
    "far away": Circle(Point2(4.0, 0.0), 1.0),
}
for name, p in probes.items():
    r = probe_circle_intersection(K, p)
    arcs = sum(m for _, m in r.arcs)
    print(f"{name:22s} verdict={r.verdict}  measure in K={arcs:.3f} rad  components={r.components}")
