"""Star and filler motifs: wheel stars in cyclic polygons, ray-pair motifs in
fillers, the barrel-hexagon crossing fix, and whole-design assembly.

A single contact angle drives everything: cyclic polygons get wheel stars
whose inner radius is derived from the angle, filler polygons grow ray pairs
from edge midpoints that continue the neighboring star strokes straight
across shared edges, so the finished design reads as one connected pattern.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations

from . import geometry as geo
from .complexes import Complex, TORUS
from .errors import (EmptySelection, IncompatibleAngle, MotifFailure,
                     StarDistortion, TooFewNeighbors)
from .packing import Packing, select_interior
from .patch import (BARREL_HEXAGON, CYCLIC, FILLER, GADGET_PENTAGON, Patch,
                    PatchPolygon, circle_key)

ALL_NEIGHBORS_KEPT = "all_neighbors_kept"
ANY_TWO_KEPT = "any_two_kept"


@dataclass(frozen=True)
class MotifParams:
    theta: float = 2.0 * math.pi / 5.0
    alpha_override: float = None
    trim_depth: int = 1
    trim_filler_rule: str = ALL_NEIGHBORS_KEPT
    keep_override: frozenset = None
    stamp: tuple = (1, 1)

    def __post_init__(self):
        if not 0.0 < self.theta < math.pi / 2.0:
            raise ValueError("theta must lie in (0, pi/2)")
        if self.alpha_override is not None and not 0.0 < self.alpha_override < 1.0:
            raise ValueError("alpha_override must lie in (0, 1)")
        if self.trim_filler_rule not in (ALL_NEIGHBORS_KEPT, ANY_TWO_KEPT):
            raise ValueError(f"unknown trim_filler_rule {self.trim_filler_rule!r}")
        if self.keep_override is not None:
            object.__setattr__(self, "keep_override", frozenset(self.keep_override))


# -- contact angle conversions -------------------------------------------------


def alpha_from_theta_consecutive(n, theta):
    """Inner-circle ratio for the consecutive-point star.

    Normalized against the circumradius of the polygon whose edge midpoints
    carry the star points: the star's inner vertices land on a circle of
    radius alpha * R.
    """
    if n < 3:
        raise ValueError("need n >= 3")
    if not 0.0 < theta < math.pi / 2.0:
        raise IncompatibleAngle("theta must lie in (0, pi/2)")
    den = math.sin(math.pi * (n + 2) / (2.0 * n) - theta)
    if abs(den) < 1e-12:
        raise IncompatibleAngle("contact angle makes the star rays parallel")
    alpha = 1.0 - math.sin(math.pi / n) * math.sin(theta) / den
    if not 0.0 < alpha <= 1.0:
        raise IncompatibleAngle(f"alpha {alpha:.4f} outside (0, 1]")
    return alpha


def alpha_from_theta_skip(n, theta):
    """Inner-circle ratio for the every-other-point star.

    Encodes the inner vertices' depth below the midpoint circle, normalized
    against the circumradius R: the vertices land at c - (1 - alpha) * R,
    with c the midpoint-circle radius.
    """
    if n < 5:
        raise ValueError("need n >= 5")
    if not 0.0 < theta < math.pi / 2.0:
        raise IncompatibleAngle("theta must lie in (0, pi/2)")
    if theta <= math.pi / n:
        raise IncompatibleAngle(
            f"theta <= pi/{n} inverts the skip star")
    den = math.sin(math.pi / 2.0 + 2.0 * math.pi / n - theta)
    if den <= 1e-12:
        raise IncompatibleAngle("contact angle makes the star rays parallel")
    alpha = 1.0 - (2.0 * math.sin(math.pi / n)
                   * math.sin(math.pi * (n - 2) / (2.0 * n))
                   * math.sin(theta - math.pi / n)) / den
    if not 0.0 < alpha <= 1.0:
        raise IncompatibleAngle(f"alpha {alpha:.4f} outside (0, 1]")
    return alpha


def consecutive_inner_radius(midpoint_radius, n, alpha):
    """Star-corner circle radius from the consecutive-form alpha."""
    return alpha * midpoint_radius / math.cos(math.pi / n)


def skip_inner_radius(midpoint_radius, n, alpha):
    """Star-corner circle radius from the skip-form alpha."""
    return midpoint_radius * (1.0 - (1.0 - alpha) / math.cos(math.pi / n))


# -- wheel construction ----------------------------------------------------------


def wheel_star(points, center, inner_radius, skip=2):
    """Zig-zag star over a convex loop of points.

    For each chord (points[i], points[i+skip]) the perpendicular bisector
    meets the inner circle; the intersection nearer the chord midpoint
    becomes a star corner joined to both chord ends. Returns (segments,
    corners) with corners[i] the inner vertex of chord i.
    """
    n = len(points)
    if n < 2 * skip + 1:
        raise TooFewNeighbors(f"wheel star needs > {2 * skip} points, got {n}")
    if inner_radius <= 0.0:
        raise StarDistortion("inner radius must be positive")
    segments = []
    corners = []
    for i in range(n):
        p = points[i]
        q = points[(i + skip) % n]
        m = geo.midpoint(p, q)
        chord = geo.sub(q, p)
        if geo.norm(chord) < 1e-15:
            raise StarDistortion(f"chord {i} has zero length", index=i)
        d = geo.normalize(geo.perp(chord))
        w = geo.sub(m, center)
        b = geo.dot(d, w)
        c = geo.dot(w, w) - inner_radius * inner_radius
        disc = b * b - c
        if disc < 0.0:
            raise StarDistortion(
                f"bisector of chord {i} misses the inner circle", index=i)
        s = math.sqrt(disc)
        t1, t2 = -b - s, -b + s
        if abs(abs(t1) - abs(t2)) < 1e-12 * max(1.0, inner_radius):
            raise StarDistortion(
                f"chord {i} midpoint is ambiguous against the inner circle",
                index=i)
        t = t1 if abs(t1) < abs(t2) else t2
        x = (m[0] + t * d[0], m[1] + t * d[1])
        corners.append(x)
        segments.append((p, x))
        segments.append((q, x))
    return segments, corners


@dataclass
class StarMotif:
    segments: list
    corners: list
    edge_rays: dict   # edge index -> (midpoint, (dir into polygon, dir))


def star_in_cyclic_polygon(polygon: PatchPolygon, circle, params: MotifParams):
    """Wheel star whose outer points are the polygon's edge midpoints."""
    m = len(polygon.points)
    if m < 5:
        raise TooFewNeighbors(f"star needs >= 5 polygon vertices, got {m}")
    center, _radius = circle
    mids = [geo.midpoint(*polygon.edge_points(i)) for i in range(m)]
    r = sum(geo.dist(p, center) for p in mids) / m
    if params.alpha_override is not None:
        alpha = params.alpha_override
    else:
        alpha = alpha_from_theta_skip(m, params.theta)
    rho = skip_inner_radius(r, m, alpha)
    if rho <= 0.0:
        raise IncompatibleAngle("inner radius collapsed to zero")
    segments, corners = wheel_star(mids, center, rho, skip=2)
    edge_rays = {}
    for i in range(m):
        into1 = geo.normalize(geo.sub(corners[i], mids[i]))
        into2 = geo.normalize(geo.sub(corners[(i - 2) % m], mids[i]))
        edge_rays[i] = (mids[i], (into1, into2))
    return StarMotif(segments, corners, edge_rays)


# -- polygons-in-contact ---------------------------------------------------------


@dataclass
class PicMotif:
    segments: list        # ((x1,y1),(x2,y2)) per matched ray
    pairs: list           # ((edge_a, slot_a), (edge_b, slot_b), X)
    rays: dict            # (edge, slot) -> (origin, dir)


def _edge_rays(polygon, edge_angles):
    rays = {}
    n = polygon.edge_count()
    for i in range(n):
        a, b = polygon.edge_points(i)
        u = geo.normalize(geo.sub(b, a))
        mid = geo.midpoint(a, b)
        af, ab = edge_angles[i]
        rays[(i, 0)] = (mid, geo.rotate(u, af))
        rays[(i, 1)] = (mid, geo.rotate(u, ab))
    return rays


def _pair_hit(polygon, rays, ra, rb):
    """Intersection record for two rays, or None when they cannot meet."""
    o1, d1 = rays[ra]
    o2, d2 = rays[rb]
    hit = geo.ray_intersection(o1, d1, o2, d2)
    if hit is None:
        # facing collinear rays merge halfway between their origins
        if geo.dot(d1, d2) < 0.0 and abs(geo.cross(d1, geo.sub(o2, o1))) < 1e-9:
            x = geo.midpoint(o1, o2)
            t = geo.dot(geo.sub(x, o1), d1)
            if t <= 1e-12:
                return None
            return (2.0 * t, x)
        return None
    t, s = hit
    if t <= 1e-12 or s <= 1e-12:
        return None
    x = (o1[0] + t * d1[0], o1[1] + t * d1[1])
    if not geo.point_in_polygon(x, polygon.points, tol=1e-9):
        return None
    return (t + s, x)


def pic_motif(polygon: PatchPolygon, edge_angles):
    """Ray-pair motif: two rays per edge midpoint, truncated mutually.

    Rays from edges sharing a corner are matched first; when that fails the
    minimal-total-length perfect matching over all ray pairs is used.
    """
    n = polygon.edge_count()
    if len(edge_angles) != n:
        raise ValueError("need one angle pair per edge")
    rays = _edge_rays(polygon, edge_angles)

    pairs = []
    ok = True
    for i in range(n):
        ra = (i, 0)
        rb = ((i + 1) % n, 1)
        hit = _pair_hit(polygon, rays, ra, rb)
        if hit is None:
            ok = False
            break
        pairs.append((ra, rb, hit[1]))
    if not ok:
        pairs = _global_matching(polygon, rays)
        if pairs is None:
            raise MotifFailure(
                f"no consistent ray matching for polygon {polygon.id}",
                polygon_id=polygon.id)
    segments = []
    for ra, rb, x in pairs:
        segments.append((rays[ra][0], x))
        segments.append((rays[rb][0], x))
    return PicMotif(segments, pairs, rays)


def _global_matching(polygon, rays):
    keys = sorted(rays)
    cost = {}
    for ra, rb in combinations(keys, 2):
        if ra[0] == rb[0]:
            continue
        hit = _pair_hit(polygon, rays, ra, rb)
        if hit is not None:
            cost[(ra, rb)] = hit

    best = [math.inf, None]

    def go(remaining, acc, total):
        if not remaining:
            if total < best[0]:
                best[0] = total
                best[1] = list(acc)
            return
        ra = remaining[0]
        rest = remaining[1:]
        for rb in rest:
            key = (ra, rb) if (ra, rb) in cost else None
            if key is None:
                continue
            length, x = cost[key]
            if total + length >= best[0]:
                continue
            acc.append((ra, rb, x))
            go([r for r in rest if r != rb], acc, total + length)
            acc.pop()

    go(keys, [], 0.0)
    return best[1]


# -- barrel hexagon fix -----------------------------------------------------------


def fix_bowtie_hexagon(hex_poly: PatchPolygon, motif: PicMotif):
    """Replace crossing waist V's with an X joining opposing edge midpoints.

    Returns (motif, changed, reangled) where reangled maps each affected
    end-edge index to (old ray direction, new ray direction), both pointing
    into the hexagon, so neighboring motifs can be rebuilt to continue the
    X strokes straight across the shared edges.
    """
    o_keys = hex_poly.meta.get("waist_keys")
    if o_keys is None:
        return motif, False, {}
    idx = {k: i for i, k in enumerate(hex_poly.keys)}
    n = len(hex_poly.points)
    corner_recs = []
    for ok in o_keys:
        if ok not in idx:
            return motif, False, {}
        ci = idx[ok]
        e_prev, e_next = (ci - 1) % n, ci
        record = None
        for ra, rb, x in motif.pairs:
            if {ra[0], rb[0]} == {e_prev, e_next}:
                record = (ra, rb, x)
                break
        if record is None:
            return motif, False, {}
        corner_recs.append((e_prev, e_next, record))

    (p1, n1, rec1), (p2, n2, rec2) = corner_recs
    segs1 = [(motif.rays[rec1[0]][0], rec1[2]), (motif.rays[rec1[1]][0], rec1[2])]
    segs2 = [(motif.rays[rec2[0]][0], rec2[2]), (motif.rays[rec2[1]][0], rec2[2])]
    crossing = any(
        geo.segments_properly_intersect(a1, a2, b1, b2)
        for a1, a2 in segs1 for b1, b2 in segs2)
    if not crossing:
        return motif, False, {}

    freed = {}
    for rec in (rec1, rec2):
        for ray in (rec[0], rec[1]):
            freed[ray[0]] = ray
    drop = {(rec1[0], rec1[1]), (rec2[0], rec2[1])}
    new_pairs = [pr for pr in motif.pairs if (pr[0], pr[1]) not in drop]
    mids = {e: geo.midpoint(*hex_poly.edge_points(e)) for e in freed}
    reangled = {}
    for ea, eb in ((n1, p2), (n2, p1)):  # opposing end edges
        ma, mb = mids[ea], mids[eb]
        x = geo.midpoint(ma, mb)
        new_pairs.append((freed[ea], freed[eb], x))
        reangled[ea] = (motif.rays[freed[ea]][1], geo.normalize(geo.sub(mb, ma)))
        reangled[eb] = (motif.rays[freed[eb]][1], geo.normalize(geo.sub(ma, mb)))
    segments = []
    for ra, rb, x in new_pairs:
        segments.append((motif.rays[ra][0], x))
        segments.append((motif.rays[rb][0], x))
    return PicMotif(segments, new_pairs, motif.rays), True, reangled


# -- design assembly ---------------------------------------------------------------


@dataclass
class Design:
    motifs: dict            # polygon id -> list of segments
    rosettes: dict          # circle id -> {order, center, members}
    kept: set               # circle ids surviving the trim
    failures: list = field(default_factory=list)
    lattice: tuple = None

    def segment_count(self):
        return sum(len(s) for s in self.motifs.values())

    def to_json_dict(self):
        segs = []
        for pid in self.motifs:
            for (x1, y1), (x2, y2) in self.motifs[pid]:
                segs.append({"polygon": pid, "x1": x1, "y1": y1,
                             "x2": x2, "y2": y2})
        return {
            "segments": segs,
            "rosettes": [{"circle": v, "order": r["order"],
                          "center": list(r["center"])}
                         for v, r in sorted(self.rosettes.items())],
            "kept": sorted(self.kept),
        }


def assemble(patch: Patch, packing: Packing, cx: Complex,
             params: MotifParams = MotifParams()) -> Design:
    """Build motifs for every patch polygon, fix barrels, trim, and stamp."""
    failures = []
    stars = {}
    star_edge_dirs = {}
    for poly in patch.cyclic_polygons():
        if len(poly.points) < 5:
            continue
        v = poly.circle
        try:
            star = star_in_cyclic_polygon(poly, packing.circles[v], params)
        except (IncompatibleAngle, StarDistortion, TooFewNeighbors) as exc:
            failures.append((poly.id, str(exc)))
            continue
        stars[v] = star
        for i in range(len(poly.points)):
            base_edge = frozenset((poly.keys[i][0], poly.keys[(i + 1) % len(poly.keys)][0]))
            star_edge_dirs[(v, base_edge)] = star.edge_rays[i][1]

    if cx.topology == TORUS:
        requested = set(packing.circles)
        kept = requested & set(stars)
    else:
        requested = select_interior(packing, cx, params.trim_depth)
        if params.keep_override is not None:
            requested = set(params.keep_override)
        kept = requested & set(stars)
        if not kept:
            raise EmptySelection("no circle survives the trim with a motif")

    theta = params.theta
    filler_motifs = {}
    filler_angles = {}
    hexagons = []
    for poly in patch.polygons.values():
        if poly.role == CYCLIC:
            continue
        angles = []
        for i in range(poly.edge_count()):
            k1, k2 = poly.keys[i], poly.keys[(i + 1) % len(poly.keys)]
            v1, v2 = circle_key(k1), circle_key(k2)
            pair = None
            if v1 is not None and v1 == v2 and v1 in stars:
                pair = star_edge_dirs.get((v1, frozenset((k1[0], k2[0]))))
            if pair is not None:
                a, b = poly.edge_points(i)
                u = geo.normalize(geo.sub(b, a))
                ang = sorted(_angle_from_edge(u, (-d[0], -d[1])) for d in pair)
                angles.append((ang[0], ang[1]))
            else:
                angles.append((theta, math.pi - theta))
        filler_angles[poly.id] = angles
        try:
            filler_motifs[poly.id] = pic_motif(poly, angles)
        except MotifFailure as exc:
            failures.append((poly.id, str(exc)))
            continue
        if poly.role == BARREL_HEXAGON:
            hexagons.append(poly)

    for hex_poly in hexagons:
        if hex_poly.id not in filler_motifs:
            continue
        fixed, changed, reangled = fix_bowtie_hexagon(
            hex_poly, filler_motifs[hex_poly.id])
        if not changed:
            continue
        filler_motifs[hex_poly.id] = fixed
        for edge_idx, (old_dir, new_dir) in reangled.items():
            for pid, ei in patch.neighbors_of_edge(hex_poly, edge_idx):
                neighbor = patch.polygons[pid]
                if neighbor.role == CYCLIC or pid not in filler_motifs:
                    continue
                angles = list(filler_angles[pid])
                a, b = neighbor.edge_points(ei)
                u = geo.normalize(geo.sub(b, a))
                # the pentagon ray continuing the removed stroke gets
                # replaced by the continuation of the X stroke
                old_cont = _angle_from_edge(u, (-old_dir[0], -old_dir[1]))
                new_angle = _angle_from_edge(u, (-new_dir[0], -new_dir[1]))
                old = angles[ei]
                pick = 0 if abs(old[0] - old_cont) <= abs(old[1] - old_cont) else 1
                angles[ei] = (new_angle, old[1]) if pick == 0 else (old[0], new_angle)
                filler_angles[pid] = angles
                try:
                    filler_motifs[pid] = pic_motif(neighbor, angles)
                except MotifFailure as exc:
                    failures.append((pid, str(exc)))
                    filler_motifs.pop(pid, None)

    motifs = {}
    rosette_members = {}
    for poly in patch.polygons.values():
        if poly.role == CYCLIC:
            v = poly.circle
            if v in kept and v in stars:
                motifs[poly.id] = list(stars[v].segments)
                rosette_members.setdefault(v, []).insert(0, poly.id)
            continue
        if poly.id not in filler_motifs:
            continue
        touching = _touched_circles(poly)
        if cx.topology != TORUS and not _filler_kept(poly, cx, kept, params):
            continue
        motifs[poly.id] = list(filler_motifs[poly.id].segments)
        for v in touching:
            if v in kept:
                rosette_members.setdefault(v, []).append(poly.id)

    rosettes = {}
    for v in sorted(kept):
        poly = patch.by_circle(v)
        if poly is None or v not in stars:
            continue
        rosettes[v] = {
            "order": len(poly.points),
            "center": packing.center(v),
            "members": rosette_members.get(v, []),
        }

    # failures on polygons the trim discards anyway are not reportable
    relevant = []
    for pid, msg in failures:
        poly = patch.polygons.get(pid)
        if poly is None:
            relevant.append((pid, msg))
            continue
        if poly.role == CYCLIC:
            if poly.circle in requested:
                relevant.append((pid, msg))
        elif cx.topology == TORUS or _filler_kept(poly, cx, kept, params):
            relevant.append((pid, msg))

    design = Design(motifs, rosettes, kept, relevant,
                    lattice=packing.lattice)
    if cx.topology == TORUS:
        _stamp(design, params.stamp)
    return design


def _angle_from_edge(u, d):
    a = math.atan2(geo.cross(u, d), geo.dot(u, d))
    if a <= 0.0:
        a += math.pi
        if a <= 0.0 or a >= math.pi:
            raise MotifFailure("ray direction degenerate against its edge")
    return a


def _touched_circles(poly):
    out = []
    for k in poly.keys:
        v = circle_key(k)
        if v is not None and v not in out:
            out.append(v)
    return out


def _filler_kept(poly, cx, kept, params):
    if poly.role == FILLER:
        tri = poly.meta["triangle"]
        if params.trim_filler_rule == ALL_NEIGHBORS_KEPT:
            return all(v in kept for v in tri)
        u, w = poly.meta["pair"]
        return u in kept and w in kept
    # gadget cluster polygons
    rim = _touched_circles(poly)
    if params.trim_filler_rule == ALL_NEIGHBORS_KEPT:
        gadget_rims = poly.meta.get("rim_circles", rim)
        return all(v in kept for v in gadget_rims)
    return all(v in kept for v in rim)


def _stamp(design: Design, counts):
    """Duplicate every motif across a block of lattice translations."""
    if design.lattice is None:
        return
    (ax, ay), (bx, by) = design.lattice
    na, nb = counts
    base = dict(design.motifs)
    for i in range(-na, na + 1):
        for j in range(-nb, nb + 1):
            if (i, j) == (0, 0):
                continue
            dx, dy = i * ax + j * bx, i * ay + j * by
            for pid, segs in base.items():
                design.motifs[f"{pid}@{i},{j}"] = [
                    ((x1 + dx, y1 + dy), (x2 + dx, y2 + dy))
                    for (x1, y1), (x2, y2) in segs]
