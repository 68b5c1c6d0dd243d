"""End-to-end orchestration shared by the CLI and the HTTP service."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .complexes import Complex, validate
from .errors import ParseError
from .motif import ALL_NEIGHBORS_KEPT, Design, MotifParams, assemble
from .packing import DEGREE_FORMULA, Packing, SolverConfig, layout, solve_radii
from .patch import SCALE, Patch, PatchParams, build_patch, optimize_tau
from .render import MOTIF, Scene, StyleConfig, emit_svg


@dataclass
class PipelineResult:
    complex: Complex
    packing: Packing
    patch: Patch
    design: Design
    tau: float
    tau_curve: list = None

    def svg(self, style: StyleConfig = None):
        style = style or StyleConfig()
        return emit_svg(Scene(self.packing, self.patch, self.design), style)


def run_pipeline(cx: Complex,
                 tau: float = 0.8,
                 theta: float = 2.0 * math.pi / 5.0,
                 trim_depth: int = 1,
                 tau_mode: str = SCALE,
                 optimize: bool = False,
                 alpha_override: float = None,
                 filler_rule: str = ALL_NEIGHBORS_KEPT,
                 keep: frozenset = None,
                 stamp: tuple = (1, 1),
                 boundary_mode=DEGREE_FORMULA,
                 solver: SolverConfig = None) -> PipelineResult:
    """Validate, pack, patch, and decorate a complex in one call."""
    report = validate(cx)
    if not report.ok():
        raise ParseError(f"invalid complex: {report}", violations=report)
    config = solver or SolverConfig(boundary_mode=boundary_mode)
    radii = solve_radii(cx, config)
    packing = layout(cx, radii)

    curve = None
    if optimize:
        tau, curve = optimize_tau(packing, cx, tau_mode=tau_mode)
    patch = build_patch(packing, cx, PatchParams(tau=tau, tau_mode=tau_mode))
    params = MotifParams(theta=theta, alpha_override=alpha_override,
                         trim_depth=trim_depth, trim_filler_rule=filler_rule,
                         keep_override=keep, stamp=stamp)
    design = assemble(patch, packing, cx, params)
    return PipelineResult(cx, packing, patch, design, tau, curve)
