"""Circle packing solver: radii iteration, layout, and interior selection.

The radius stage adjusts one circle at a time (ascending vertex id) until the
angle subtended by each interior circle's tangent neighbors sums to 2*pi.
The layout stage then propagates centers from a seed edge; for torus
complexes it unrolls the universal cover and recovers the two lattice
translation vectors from loop closures.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Union

import numpy as np

from .complexes import Complex, DISK, TORUS
from .errors import (DegenerateBoundaryVertex, EmptySelection,
                     LayoutInconsistency, NonConvergence, NothingToSolve)

TWO_PI = 2.0 * math.pi

DEGREE_FORMULA = "degree"


@dataclass(frozen=True)
class SolverConfig:
    residual_tolerance: float = 1e-10
    max_sweeps: int = 50_000
    boundary_mode: Union[str, Mapping[int, float]] = DEGREE_FORMULA

    def __post_init__(self):
        if not self.residual_tolerance > 0:
            raise ValueError("residual_tolerance must be positive")
        if self.max_sweeps < 1:
            raise ValueError("max_sweeps must be at least 1")


@dataclass(frozen=True)
class Packing:
    """Solved circles plus the tangency list they realize.

    ``lattice`` is None for disk packings; for a torus it holds the two
    translation vectors (row-major 2x2 tuple) spanning the unrolled period,
    and every circle center is the base (0, 0) lattice copy.
    """

    circles: dict            # vertex id -> ((x, y), radius)
    tangencies: tuple        # undirected (u, v) pairs, sorted
    lattice: tuple = None    # ((ax, ay), (bx, by)) or None
    wraps: dict = field(default_factory=dict)  # directed (u, v) -> (wx, wy)

    def center(self, v):
        return self.circles[v][0]

    def radius(self, v):
        return self.circles[v][1]

    def ids(self):
        return sorted(self.circles)

    def neighbor_center(self, u, v):
        """Center of v's copy adjacent to the base copy of u."""
        c = self.circles[v][0]
        if self.lattice is None:
            return c
        wx, wy = self.wraps.get((u, v), (0, 0))
        (ax, ay), (bx, by) = self.lattice
        return (c[0] + wx * ax + wy * bx, c[1] + wx * ay + wy * by)

    def translate(self, shift):
        dx, dy = shift
        return {v: ((c[0] + dx, c[1] + dy), r) for v, (c, r) in self.circles.items()}

    def lattice_copies(self, counts=(1, 1)):
        """Translated circle sets covering a (2a+1) x (2b+1) block of periods."""
        if self.lattice is None:
            return [((0, 0), self.circles)]
        (ax, ay), (bx, by) = self.lattice
        out = []
        na, nb = counts
        for i in range(-na, na + 1):
            for j in range(-nb, nb + 1):
                out.append(((i, j), self.translate((i * ax + j * bx,
                                                    i * ay + j * by))))
        return out

    def to_json_dict(self):
        doc = {"circles": [{"id": v, "x": c[0], "y": c[1], "r": r}
                           for v, (c, r) in sorted(self.circles.items())]}
        if self.lattice is not None:
            doc["lattice"] = [list(self.lattice[0]), list(self.lattice[1])]
        return doc


def boundary_radius(n: int) -> float:
    """Radius of a circle perfectly surrounded by 2n-2 unit circles."""
    if n <= 2:
        raise DegenerateBoundaryVertex(
            f"boundary vertex of degree {n} admits no positive radius")
    phi = math.pi / (2 * n - 2)
    return (1.0 - math.sin(phi)) / math.sin(phi)


def _beta(r, a, b):
    """Angle at the r-circle's center in a mutually tangent triple.

    Equals arccos(((r+a)^2 + (r+b)^2 - (a+b)^2) / (2(r+a)(r+b))); the
    half-angle form below is algebraically identical and keeps the argument
    strictly inside (0, 1) for positive radii.
    """
    return 2.0 * math.asin(math.sqrt((a * b) / ((r + a) * (r + b))))


def _beta_deriv(r, a, b):
    u2 = (a * b) / ((r + a) * (r + b))
    u = math.sqrt(u2)
    du = -0.5 * u * (2 * r + a + b) / ((r + a) * (r + b))
    return 2.0 * du / math.sqrt(1.0 - u2)


def angle_sum(r, neighbor_radii, wrap=True):
    """Total angle the tangent neighbor circles subtend around radius r.

    Neighbors must be in cyclic order; ``wrap`` includes the closing pair
    (interior vertex) and is dropped for boundary fans.
    """
    if r <= 0 or any(a <= 0 for a in neighbor_radii):
        raise ValueError("radii must be positive")
    k = len(neighbor_radii)
    if k < 2:
        raise ValueError("need at least two neighbors")
    total = 0.0
    last = k if wrap else k - 1
    for i in range(last):
        total += _beta(r, neighbor_radii[i], neighbor_radii[(i + 1) % k])
    return total


def _flower_angle(x, nbr, r):
    total = 0.0
    k = len(nbr)
    prev = r[nbr[k - 1]]
    for i in range(k):
        cur = r[nbr[i]]
        total += 2.0 * math.asin(math.sqrt(
            (prev * cur) / ((x + prev) * (x + cur))))
        prev = cur
    return total


def _newton_radius(x, nbr, r, fx):
    """Safeguarded Newton for angle_sum(x) = 2*pi given f(x) = sum - 2*pi.

    angle_sum is strictly decreasing in x, so bisection always has a
    bracket to fall back on."""
    k = len(nbr)
    lo = hi = x
    flo = fhi = fx
    while flo < 0.0:
        lo *= 0.5
        flo = _flower_angle(lo, nbr, r) - TWO_PI
        if lo < 1e-300:
            return lo
    while fhi > 0.0:
        hi *= 2.0
        fhi = _flower_angle(hi, nbr, r) - TWO_PI
        if hi > 1e300:
            return hi
    for _ in range(80):
        if abs(fx) < 1e-14:
            return x
        if fx > 0.0:
            lo = x
        else:
            hi = x
        dfx = 0.0
        prev = r[nbr[k - 1]]
        for i in range(k):
            cur = r[nbr[i]]
            pa = (x + prev) * (x + cur)
            u2 = (prev * cur) / pa
            dfx -= math.sqrt(u2 / (1.0 - u2)) * (2.0 * x + prev + cur) / pa
            prev = cur
        xn = x - fx / dfx if dfx < 0.0 else lo
        if not (lo < xn < hi):
            xn = 0.5 * (lo + hi)
        if abs(xn - x) <= 1e-16 * x:
            return xn
        x = xn
        fx = _flower_angle(x, nbr, r) - TWO_PI
    return x


def solve_radii(cx: Complex, config: SolverConfig = SolverConfig()):
    """Radii satisfying the packing angle conditions, as id -> radius."""
    if cx.topology == TORUS:
        boundary = []
        free = list(cx.vertex_ids)
        start = {v: 1.0 for v in cx.vertex_ids}
    else:
        start = {}
        boundary = sorted(cx.boundary_vertices)
        if config.boundary_mode == DEGREE_FORMULA:
            for v in boundary:
                start[v] = boundary_radius(cx.degree(v))
        else:
            explicit = dict(config.boundary_mode)
            missing = [v for v in boundary if v not in explicit]
            if missing:
                raise ValueError(f"no boundary radius given for vertex {missing[0]}")
            for v in boundary:
                rad = float(explicit[v])
                if rad <= 0:
                    raise ValueError(f"boundary radius for {v} must be positive")
                start[v] = rad
        free = sorted(cx.interior_vertices)
        if not free:
            raise NothingToSolve("complex has no interior vertices", radii=start)
        for v in free:
            start[v] = 1.0

    ids = sorted(cx.vertex_ids)
    index = {v: i for i, v in enumerate(ids)}
    r = [start[v] for v in ids]
    free_idx = [index[v] for v in free]
    links = [[index[u] for u in cx.link(v)[0]] for v in free]
    tol = config.residual_tolerance

    worst = math.inf
    for sweep in range(config.max_sweeps):
        worst = 0.0
        for j, fi in enumerate(free_idx):
            nbr = links[j]
            fx = _flower_angle(r[fi], nbr, r) - TWO_PI
            afx = abs(fx)
            if afx > worst:
                worst = afx
            if afx > 1e-14:
                r[fi] = _newton_radius(r[fi], nbr, r, fx)
        if cx.topology == TORUS:
            top = max(r)
            r = [x / top for x in r]
        if worst <= tol:
            final = max(abs(_flower_angle(r[fi], links[j], r) - TWO_PI)
                        for j, fi in enumerate(free_idx))
            if final <= tol:
                return {v: r[index[v]] for v in ids}
    raise NonConvergence(
        f"no convergence after {config.max_sweeps} sweeps "
        f"(worst residual {worst:.3e})", worst_residual=worst,
        sweeps=config.max_sweeps)


# -- layout -------------------------------------------------------------------


def layout(cx: Complex, radii: Mapping[int, float]) -> Packing:
    """Place circle centers by propagating tangency triangles from a seed."""
    if cx.topology == TORUS:
        return _layout_torus(cx, radii)
    return _layout_disk(cx, radii)


def _seed_vertices(cx):
    interior = sorted(cx.interior_vertices)
    root = interior[0] if interior else cx.vertex_ids[0]
    nbr = cx.neighbors(root)[0]
    return root, nbr


def _place_third(cu, ru, cv, rv, rw):
    b = _beta(ru, rv, rw)
    ux, uy = cv[0] - cu[0], cv[1] - cu[1]
    d = math.hypot(ux, uy)
    ux, uy = ux / d, uy / d
    cb, sb = math.cos(b), math.sin(b)
    dx, dy = cb * ux - sb * uy, sb * ux + cb * uy
    rr = ru + rw
    return (cu[0] + rr * dx, cu[1] + rr * dy)


def _layout_disk(cx, radii):
    root, nbr = _seed_vertices(cx)
    pos = {root: (0.0, 0.0), nbr: (radii[root] + radii[nbr], 0.0)}
    queue = [(root, nbr), (nbr, root)]
    seen = set(queue)
    head = 0
    while head < len(queue):
        u, v = queue[head]
        head += 1
        tri = cx.directed_triangle.get((u, v))
        if tri is None:
            continue
        w = tri[2]
        if w not in pos:
            pos[w] = _place_third(pos[u], radii[u], pos[v], radii[v], radii[w])
        for e in ((u, w), (w, v), (v, u)):
            if e not in seen:
                seen.add(e)
                queue.append(e)
    if len(pos) != len(cx.vertex_ids):
        raise LayoutInconsistency("layout did not reach every vertex")
    packing = Packing(
        circles={v: (pos[v], float(radii[v])) for v in cx.vertex_ids},
        tangencies=tuple(cx.edges))
    _verify_tangencies(packing)
    return packing


def _layout_torus(cx, radii):
    """Unroll one fundamental domain triangle by triangle.

    Each triangle instance carries its own corner copies (position plus
    integer lattice coordinate), so shared edges always glue geometrically
    adjacent copies; re-encounters of a vertex at a different lattice
    coordinate become loop-closure equations that determine the two
    translation vectors.
    """
    root, nbr = _seed_vertices(cx)
    t0 = cx.directed_triangle[(root, nbr)]
    a, b, c = t0
    inst0 = {
        a: ((0, 0), (0.0, 0.0)),
        b: (cx.wrap(a, b), (radii[a] + radii[b], 0.0)),
    }
    inst0[c] = (_lam_add(inst0[a][0], cx.wrap(a, c)),
                _place_third(inst0[a][1], radii[a], inst0[b][1], radii[b],
                             radii[c]))
    instances = {t0: inst0}
    lam = {v: inst0[v][0] for v in t0}
    pos = {v: inst0[v][1] for v in t0}

    closures = []
    queue = [t0]
    head = 0
    while head < len(queue):
        tri = queue[head]
        head += 1
        inst = instances[tri]
        for i in range(3):
            u, v = tri[i], tri[(i + 1) % 3]
            other = cx.directed_triangle.get((v, u))
            if other is None:
                continue
            if other in instances:
                oinst = instances[other]
                for x in (u, v):
                    if x in oinst:
                        dlam = (inst[x][0][0] - oinst[x][0][0],
                                inst[x][0][1] - oinst[x][0][1])
                        if dlam != (0, 0):
                            dpos = (inst[x][1][0] - oinst[x][1][0],
                                    inst[x][1][1] - oinst[x][1][1])
                            closures.append((dlam, dpos))
                continue
            w = next(x for x in other if x not in (u, v))
            lam_w = _lam_add(inst[v][0], cx.wrap(v, w))
            pos_w = _place_third(inst[v][1], radii[v], inst[u][1], radii[u],
                                 radii[w])
            instances[other] = {v: inst[v], u: inst[u], w: (lam_w, pos_w)}
            if w not in pos:
                lam[w] = lam_w
                pos[w] = pos_w
            else:
                dlam = (lam_w[0] - lam[w][0], lam_w[1] - lam[w][1])
                if dlam != (0, 0):
                    closures.append((dlam, (pos_w[0] - pos[w][0],
                                            pos_w[1] - pos[w][1])))
            queue.append(other)

    if len(pos) != len(cx.vertex_ids):
        raise LayoutInconsistency("layout did not reach every vertex")
    if not closures:
        raise LayoutInconsistency("torus layout produced no loop closures")
    A = np.array([d for d, _ in closures], dtype=float)
    B = np.array([p for _, p in closures], dtype=float)
    L, *_ = np.linalg.lstsq(A, B, rcond=None)
    if abs(np.linalg.det(L)) < 1e-9 * max(1.0, np.abs(L).max() ** 2):
        raise LayoutInconsistency("degenerate lattice: wrap tags do not span a torus")
    resid = A @ L - B
    scale = max(1.0, float(np.abs(B).max()))
    if float(np.abs(resid).max()) > 1e-6 * scale:
        raise LayoutInconsistency(
            f"holonomy closures disagree by {float(np.abs(resid).max()):.3e}; "
            f"radii likely unconverged")

    centers = {}
    for v in cx.vertex_ids:
        lx, ly = lam[v]
        centers[v] = (pos[v][0] - lx * L[0, 0] - ly * L[1, 0],
                      pos[v][1] - lx * L[0, 1] - ly * L[1, 1])
    packing = Packing(
        circles={v: (centers[v], float(radii[v])) for v in cx.vertex_ids},
        tangencies=tuple(cx.edges),
        lattice=((float(L[0, 0]), float(L[0, 1])),
                 (float(L[1, 0]), float(L[1, 1]))),
        wraps={e: cx.wrap(*e) for e in _both_directions(cx.edges)})
    _verify_tangencies(packing)
    return packing


def _both_directions(edges):
    for u, v in edges:
        yield (u, v)
        yield (v, u)


def _lam_add(lam, wrap):
    return (lam[0] + wrap[0], lam[1] + wrap[1])


def tangency_defect(packing: Packing, u, v):
    """Relative gap between circles u and v against perfect tangency."""
    cu, ru = packing.circles[u]
    cv = packing.neighbor_center(u, v)
    rv = packing.circles[v][1]
    gap = math.hypot(cv[0] - cu[0], cv[1] - cu[1]) - (ru + rv)
    return abs(gap) / (ru + rv)


def worst_tangency_defect(packing: Packing):
    return max(tangency_defect(packing, u, v) for u, v in packing.tangencies)


def _verify_tangencies(packing, tol=1e-6):
    for u, v in packing.tangencies:
        d = tangency_defect(packing, u, v)
        if d > tol:
            raise LayoutInconsistency(
                f"tangency ({u}, {v}) off by {d:.3e} relative; "
                f"radii unconverged or topology inconsistent")


def overlap_violations(packing: Packing, slack=1e-6):
    """Non-adjacent circle pairs closer than the sum of their radii."""
    ids = packing.ids()
    adjacent = set(packing.tangencies)
    bad = []
    for i, u in enumerate(ids):
        cu, ru = packing.circles[u]
        for v in ids[i + 1:]:
            if (u, v) in adjacent or (v, u) in adjacent:
                continue
            cv, rv = packing.circles[v]
            if math.hypot(cv[0] - cu[0], cv[1] - cu[1]) < (ru + rv) * (1.0 - slack):
                bad.append((u, v))
    return bad


# -- interior selection --------------------------------------------------------


def select_interior(packing: Packing, cx: Complex, trim_depth: int = 1):
    """Circles farther than trim_depth from every boundary vertex, restricted
    to the largest connected component of the survivors."""
    if trim_depth < 0:
        raise ValueError("trim_depth must be non-negative")
    if cx.topology == TORUS:
        return set(cx.vertex_ids)
    boundary = sorted(cx.boundary_vertices)
    dist = {v: 0 for v in boundary}
    frontier = boundary
    d = 0
    while frontier:
        d += 1
        nxt = []
        for v in frontier:
            for u in cx.neighbors(v):
                if u not in dist:
                    dist[u] = d
                    nxt.append(u)
        frontier = sorted(nxt)
    kept = {v for v in cx.vertex_ids if dist.get(v, math.inf) > trim_depth}
    if not kept:
        raise EmptySelection(
            f"trim_depth {trim_depth} removes every circle")
    components = []
    remaining = set(kept)
    while remaining:
        start = min(remaining)
        comp = {start}
        stack = [start]
        while stack:
            v = stack.pop()
            for u in cx.neighbors(v):
                if u in remaining and u not in comp:
                    comp.add(u)
                    stack.append(u)
        remaining -= comp
        components.append(comp)
    components.sort(key=lambda c: (-len(c), min(c)))
    return components[0]
