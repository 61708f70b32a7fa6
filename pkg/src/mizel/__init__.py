"""Rectangle property of plane curves, tangent-disk classification and
circle probes of compact sets built from disk packings."""

from .errors import (BadParameter, ConfigError, ConvexityViolation, DegenerateTriple, EmptySet,
                     GeometryError, InvalidRectangle, NotConvex, NotRightAngle, ResolutionTooLow,
                     WindowTooSmall)
from .geom import (Circle, Coincident, Disjoint, Point2, Rectangle, RectangleMetrics, Tangent,
                   ToleranceContext, Two, circle_circle_intersect, complete_rectangle, is_rectangle,
                   rectangle_metrics, right_angle_deviation)
from .spatial import SpatialIndex, build_index
from .curves import (Polyline, SampledCurve, SupportBody, TrigSeries, check_convex, circular_arc,
                     constant_width_check, constant_width_table, generate_circle, generate_ellipse,
                     generate_fourier_cw, generate_reuleaux, nearest_distance, perimeter,
                     reuleaux_vertices, support_of_points, support_to_curve, tangent_normal_at,
                     turning_angles, width_function)
from .scan import (InfinitesimalResult, PointSetMembership, RectangleWitness, ScanConstraints,
                   ScanReport, scan_brute_force, scan_curve, scan_rectangle_property,
                   verify_infinitesimal_condition)
from .tangent import (ClassificationParams, ClassificationReport, PointClass, classify_curve,
                      classify_point, tangent_disk_at)
from .packings import (CompactSetK, DiskPacking, EllipseCell, ProbeResult, SearchResult,
                       ShapePacking, SquareCell, curve_circle_components, exactly_m_search,
                       greedy_circle_packing, greedy_shape_packing, k_membership,
                       probe_circle_intersection)
from .svg import Scene, render_svg

__version__ = "0.1.0"

__all__ = [
    "BadParameter", "ConfigError", "ConvexityViolation", "DegenerateTriple", "EmptySet",
    "GeometryError", "InvalidRectangle", "NotConvex", "NotRightAngle", "ResolutionTooLow",
    "WindowTooSmall", "Circle", "Coincident", "Disjoint", "Point2", "Rectangle",
    "RectangleMetrics", "Tangent", "ToleranceContext", "Two", "circle_circle_intersect",
    "complete_rectangle", "is_rectangle", "rectangle_metrics", "right_angle_deviation",
    "SpatialIndex", "build_index", "Polyline", "SampledCurve", "SupportBody", "TrigSeries",
    "check_convex", "circular_arc", "constant_width_check", "constant_width_table",
    "generate_circle", "generate_ellipse", "generate_fourier_cw", "generate_reuleaux",
    "nearest_distance", "perimeter", "reuleaux_vertices", "support_of_points", "support_to_curve",
    "tangent_normal_at", "turning_angles", "width_function", "InfinitesimalResult",
    "PointSetMembership", "RectangleWitness", "ScanConstraints", "ScanReport", "scan_brute_force",
    "scan_curve", "scan_rectangle_property", "verify_infinitesimal_condition",
    "ClassificationParams", "ClassificationReport", "PointClass", "classify_curve",
    "classify_point", "tangent_disk_at", "CompactSetK", "DiskPacking", "EllipseCell",
    "ProbeResult", "SearchResult", "ShapePacking", "SquareCell", "curve_circle_components",
    "exactly_m_search", "greedy_circle_packing", "greedy_shape_packing", "k_membership",
    "probe_circle_intersection", "Scene", "render_svg",
]
