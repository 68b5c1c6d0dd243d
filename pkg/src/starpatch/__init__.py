"""Freeform star-and-rosette pattern synthesis from circle packings."""

from .complexes import (Complex, GadgetAnnotation, ValidationReport,
                        delaunay_from_points, parse, random_points, serialize,
                        validate)
from .errors import (DegenerateBoundaryVertex, DegenerateInput,
                     DegeneratePolygon, EmptyScene, EmptySelection,
                     GadgetGeometryError, IncompatibleAngle,
                     LayoutInconsistency, MotifFailure, NonConvergence,
                     NothingToSolve, ParseError, StarDistortion,
                     StarpatchError, TooFewNeighbors)
from .motif import (Design, MotifParams, alpha_from_theta_consecutive,
                    alpha_from_theta_skip, assemble, consecutive_inner_radius,
                    fix_bowtie_hexagon, pic_motif, skip_inner_radius,
                    star_in_cyclic_polygon, wheel_star)
from .packing import (Packing, SolverConfig, angle_sum, boundary_radius,
                      layout, select_interior, solve_radii,
                      worst_tangency_defect)
from .patch import (Patch, PatchParams, PatchPolygon, build_patch,
                    cyclic_polygon, csm, filler_pentagons, optimize_tau,
                    patch_error)
from .pipeline import PipelineResult, run_pipeline
from .render import Scene, StyleConfig, emit_svg

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
