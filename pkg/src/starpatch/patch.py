"""Polygonal patch construction over a circle packing.

Every circle gets a cyclic polygon (tangency points interleaved with arc
midpoints, pulled toward the center), the curvilinear gap between each
tangent trio gets three filler pentagons, and gadget annotations replace
local clusters with pentagon/hexagon arrangements. Shared polygon corners
are built once through a point registry so neighboring polygons agree on
their common edges bit-for-bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import geometry as geo
from .complexes import Complex, SQUARE, BOWTIE, TORUS
from .errors import (DegeneratePolygon, GadgetGeometryError, TooFewNeighbors)
from .packing import Packing

SCALE = "scale"
OFFSET = "offset"

CYCLIC = "cyclic"
FILLER = "filler"
GADGET_PENTAGON = "gadget_pentagon"
BARREL_HEXAGON = "barrel_hexagon"


@dataclass(frozen=True)
class PatchParams:
    tau: float = 0.8
    tau_mode: str = SCALE

    def __post_init__(self):
        if self.tau_mode == SCALE and not 0.0 < self.tau < 1.0:
            raise ValueError("tau must lie in (0, 1)")
        if self.tau_mode == OFFSET and self.tau <= 0.0:
            raise ValueError("offset distance must be positive")
        if self.tau_mode not in (SCALE, OFFSET):
            raise ValueError(f"unknown tau_mode {self.tau_mode!r}")

    def shrunk_radius(self, r):
        if self.tau_mode == SCALE:
            return self.tau * r
        d = r - self.tau
        if d <= 0.0:
            raise ValueError(f"offset {self.tau} swallows a radius-{r} circle")
        return d


@dataclass
class PatchPolygon:
    id: str
    role: str
    points: tuple          # ccw (x, y) tuples
    keys: tuple            # registry key per point
    circle: int = None     # owning circle for cyclic polygons
    meta: dict = field(default_factory=dict)

    def edge_keys(self, i):
        return frozenset((self.keys[i], self.keys[(i + 1) % len(self.keys)]))

    def edge_points(self, i):
        return self.points[i], self.points[(i + 1) % len(self.points)]

    def edge_count(self):
        return len(self.points)

    def to_json_dict(self):
        doc = {"id": self.id, "role": self.role,
               "points": [[x, y] for x, y in self.points]}
        if self.circle is not None:
            doc["circle_id"] = self.circle
        return doc


@dataclass
class Patch:
    polygons: dict                      # id -> PatchPolygon, insertion-ordered
    edge_map: dict                      # frozenset(keys) -> [(polygon id, edge index)]
    params: PatchParams

    def by_circle(self, v):
        return self.polygons.get(f"cyc:{v}")

    def cyclic_polygons(self):
        return [p for p in self.polygons.values() if p.role == CYCLIC]

    def fillers(self):
        return [p for p in self.polygons.values() if p.role == FILLER]

    def neighbors_of_edge(self, poly, i):
        entries = self.edge_map.get(poly.edge_keys(i), [])
        return [(pid, ei) for pid, ei in entries if pid != poly.id]

    def to_json_dict(self):
        return {"polygons": [p.to_json_dict() for p in self.polygons.values()]}


# ring item kinds
_TANG = "t"      # tangency vertex toward a surviving neighbor
_MID = "m"       # arc midpoint between consecutive surviving tangencies
_KEPT = "k"      # former tangency toward a removed gadget center
_TRI = "s"       # trisection point across a removed bowtie pair


def _ring_items(packing, cx, v, removed, params):
    """Ordered ccw ring of (kind, base_key, angle) for circle v.

    Every ring point lies on circle v shrunk per params: tangency vertices
    at surviving neighbors, a midpoint on every plain arc (including the
    outer arc of a boundary fan), a kept former-tangency vertex where one
    gadget center was removed, two trisection points where a bowtie pair
    was removed.
    """
    order, closed = cx.link(v)
    cv = packing.center(v)
    ang = {}
    for u in order:
        cu = packing.neighbor_center(v, u)
        ang[u] = math.atan2(cu[1] - cv[1], cu[0] - cv[0])

    n = len(order)
    surv_idx = [i for i, u in enumerate(order) if u not in removed]
    if len(surv_idx) < 2:
        raise GadgetGeometryError(
            f"gadget surgery leaves vertex {v} with fewer than 2 neighbors")

    items = []
    for si, i in enumerate(surv_idx):
        u = order[i]
        a1 = ang[u]
        items.append((_TANG, ("t", v, u), a1))
        i2 = surv_idx[(si + 1) % len(surv_idx)]
        gap = []
        j = (i + 1) % n
        while j != i2:
            gap.append(order[j])
            j = (j + 1) % n
        closing = si == len(surv_idx) - 1
        if not closed and closing and len(gap) >= 2:
            raise GadgetGeometryError(
                f"bowtie arc of boundary vertex {v} crosses the outer fan gap")
        nxt = order[i2]
        delta = (ang[nxt] - a1) % (2.0 * math.pi)
        if delta == 0.0:
            delta = 2.0 * math.pi
        if len(gap) == 0:
            items.append((_MID, ("m", v, u, nxt), a1 + delta / 2.0))
        elif len(gap) == 1:
            items.append((_KEPT, ("k", v, gap[0]), ang[gap[0]]))
        elif len(gap) == 2:
            run = tuple(sorted(gap))
            items.append((_TRI, ("s", v, run, 1), a1 + delta / 3.0))
            items.append((_TRI, ("s", v, run, 2), a1 + 2.0 * delta / 3.0))
        else:
            raise GadgetGeometryError(
                f"vertex {v} has {len(gap)} consecutive removed neighbors; "
                f"overlapping gadgets are not supported")
    return items


class _PointRegistry:
    """Computes every named patch point once; keys are (base_key, lattice)."""

    def __init__(self, packing, cx, params):
        self.packing = packing
        self.cx = cx
        self.params = params
        self.base = {}
        self.lattice = packing.lattice

    def put_ring(self, v, items):
        cv = self.packing.center(v)
        rho = self.params.shrunk_radius(self.packing.radius(v))
        for kind, key, a in items:
            if key not in self.base:
                self.base[key] = (cv[0] + rho * math.cos(a),
                                  cv[1] + rho * math.sin(a))

    def put(self, key, point):
        if key not in self.base:
            self.base[key] = (float(point[0]), float(point[1]))
        return self.base[key]

    def get(self, key, lam=(0, 0)):
        p = self.base[key]
        if lam == (0, 0) or self.lattice is None:
            return p
        (ax, ay), (bx, by) = self.lattice
        return (p[0] + lam[0] * ax + lam[1] * bx,
                p[1] + lam[0] * ay + lam[1] * by)


def circle_key(full_key):
    """Owning circle id when a registry key names a ring point, else None."""
    base = full_key[0]
    if base[0] in (_TANG, _MID, _KEPT, _TRI):
        return base[1]
    return None


def _incenter(a, b, c):
    la = geo.dist(b, c)
    lb = geo.dist(c, a)
    lc = geo.dist(a, b)
    s = la + lb + lc
    return ((la * a[0] + lb * b[0] + lc * c[0]) / s,
            (la * a[1] + lb * b[1] + lc * c[1]) / s)


def _mk_polygon(pid, role, keyed_points, circle=None, meta=None):
    keys = tuple(k for k, _ in keyed_points)
    pts = tuple(p for _, p in keyed_points)
    if geo.signed_area(pts) < 0.0:
        keys = keys[::-1]
        pts = pts[::-1]
    return PatchPolygon(pid, role, pts, keys, circle, meta or {})


# -- standalone operations -----------------------------------------------------


def cyclic_polygon(center, radius, tangency_angles, params=PatchParams(),
                   split_arcs=()):
    """Shrunken polygon of tangency points and arc midpoints for one circle.

    ``tangency_angles`` are the ccw directions of the k >= 3 tangencies;
    arcs listed in ``split_arcs`` (by leading tangency index) get two
    trisection points instead of a midpoint.
    """
    k = len(tangency_angles)
    if k < 3:
        raise TooFewNeighbors(f"cyclic polygon needs >= 3 tangencies, got {k}")
    rho = params.shrunk_radius(radius)
    angles = list(tangency_angles)
    pts = []
    for i, a1 in enumerate(angles):
        a2 = angles[(i + 1) % k]
        delta = (a2 - a1) % (2.0 * math.pi)
        if delta == 0.0:
            delta = 2.0 * math.pi
        pts.append((center[0] + rho * math.cos(a1), center[1] + rho * math.sin(a1)))
        if i in split_arcs:
            for t in (delta / 3.0, 2.0 * delta / 3.0):
                pts.append((center[0] + rho * math.cos(a1 + t),
                            center[1] + rho * math.sin(a1 + t)))
        else:
            a = a1 + delta / 2.0
            pts.append((center[0] + rho * math.cos(a), center[1] + rho * math.sin(a)))
    keys = tuple(("raw", i) for i in range(len(pts)))
    return PatchPolygon("cyc:raw", CYCLIC, tuple(pts), keys)


def filler_pentagons(trio, params=PatchParams()):
    """Three pentagons tiling the gap between three mutually tangent circles.

    ``trio`` is a ccw sequence of (center, radius). Each pentagon spans
    two circles: shrunken arc midpoint, the two shrunken tangency vertices
    flanking the mutual tangency, the partner's arc midpoint, and the
    incenter of the center triangle.
    """
    (c0, r0), (c1, r1), (c2, r2) = trio
    centers = (c0, c1, c2)
    radii = (r0, r1, r2)
    if geo.signed_area(centers) <= 0.0:
        raise ValueError("trio centers must be in ccw order")
    o = _incenter(*centers)

    def tang_angle(i, j):
        return geo.angle_of(geo.sub(centers[j], centers[i]))

    def shrunk(i, a):
        rho = params.shrunk_radius(radii[i])
        return (centers[i][0] + rho * math.cos(a), centers[i][1] + rho * math.sin(a))

    mids = []
    for i in range(3):
        j, k = (i + 1) % 3, (i + 2) % 3
        a1 = tang_angle(i, j)
        delta = (tang_angle(i, k) - a1) % (2.0 * math.pi)
        mids.append(shrunk(i, a1 + delta / 2.0))

    out = []
    for i in range(3):
        j = (i + 1) % 3
        keyed = [(("o",), o),
                 (("m", i), mids[i]),
                 (("t", i, j), shrunk(i, tang_angle(i, j))),
                 (("t", j, i), shrunk(j, tang_angle(j, i))),
                 (("m", j), mids[j])]
        out.append(_mk_polygon(f"fill:raw:{i}-{j}", FILLER,
                               [(("raw",) + k, p) for k, p in keyed]))
    return out


# -- full patch construction ---------------------------------------------------


def build_patch(packing: Packing, cx: Complex, params: PatchParams = PatchParams()):
    """Assemble the complete edge-to-edge patch, applying gadget surgery."""
    removed = cx.gadget_centers()
    for g in cx.gadgets:
        for v in (*g.centers, *g.rim):
            if v not in packing.circles:
                raise GadgetGeometryError(f"gadget references missing circle {v}")

    registry = _PointRegistry(packing, cx, params)
    rings = {}
    for v in cx.vertex_ids:
        if v in removed:
            continue
        items = _ring_items(packing, cx, v, removed, params)
        rings[v] = items
        registry.put_ring(v, items)

    polygons = {}

    def add(poly):
        polygons[poly.id] = poly

    def lam_of(anchor, v):
        if cx.topology != TORUS or v == anchor:
            return (0, 0)
        return cx.wrap(anchor, v)

    # cyclic polygons (base copies)
    for v in sorted(rings):
        items = rings[v]
        if len(items) < 3:
            continue
        keyed = [((key, (0, 0)), registry.get(key)) for _, key, _ in items]
        add(_mk_polygon(f"cyc:{v}", CYCLIC, keyed, circle=v,
                        meta={"order": len(items)}))

    # trio pentagons for gadget-free triangles
    for ti, tri in enumerate(cx.triangles):
        if any(v in removed for v in tri):
            continue
        a = tri[0]
        lam = {v: lam_of(a, v) for v in tri}
        centers = [registry_center(packing, registry, v, lam[v]) for v in tri]
        okey = ("o", tri)
        registry.put(okey, _incenter(*centers))
        for i in range(3):
            u, w, x = tri[i], tri[(i + 1) % 3], tri[(i + 2) % 3]
            full_keys = [
                (okey, (0, 0)),
                (("m", u, w, x), lam[u]),
                (("t", u, w), lam[u]),
                (("t", w, u), lam[w]),
                (("m", w, x, u), lam[w]),
            ]
            keyed = [(fk, registry.get(fk[0], fk[1])) for fk in full_keys]
            add(_mk_polygon(f"fill:{ti}:{u}-{w}", FILLER, keyed,
                            meta={"triangle": tri, "pair": (u, w)}))

    # gadget clusters
    for gi, g in enumerate(cx.gadgets):
        if g.kind == SQUARE:
            for poly in apply_square_gadget(packing, cx, g, params,
                                            registry=registry, rings=rings,
                                            tag=f"gad{gi}"):
                add(poly)
        elif g.kind == BOWTIE:
            for poly in apply_bowtie_gadget(packing, cx, g, params,
                                            registry=registry, rings=rings,
                                            tag=f"gad{gi}"):
                add(poly)

    edge_map = {}
    for pid, poly in polygons.items():
        for i in range(poly.edge_count()):
            edge_map.setdefault(poly.edge_keys(i), []).append((pid, i))
    return Patch(polygons, edge_map, params)


def registry_center(packing, registry, v, lam):
    c = packing.center(v)
    if lam == (0, 0) or registry.lattice is None:
        return c
    (ax, ay), (bx, by) = registry.lattice
    return (c[0] + lam[0] * ax + lam[1] * bx, c[1] + lam[0] * ay + lam[1] * by)


def _gap_item_next_to(rings, v, tangency_neighbor, run=None):
    """Ring gap item (kept or trisection) adjacent to ('t', v, nbr)."""
    items = rings[v]
    n = len(items)
    for i, (kind, key, _) in enumerate(items):
        if kind == _TANG and key[2] == tangency_neighbor:
            for j in (i - 1, i + 1):
                kind2, key2, _ = items[j % n]
                if kind2 in (_KEPT, _TRI):
                    if run is None or _run_of(key2) == run:
                        return key2
    raise GadgetGeometryError(
        f"no gadget gap item next to tangency ({v}, {tangency_neighbor})")


def _run_of(key):
    if key[0] == "k":
        return (key[2],)
    if key[0] == "s":
        return key[2]
    return None


def apply_square_gadget(packing, cx, gadget, params=PatchParams(),
                        registry=None, rings=None, tag="gad"):
    """Four pentagons replacing the removed center circle and its trios."""
    a = gadget.centers[0]
    rim = _rim_cycle(cx, gadget)
    registry, rings = _ensure_context(packing, cx, params, registry, rings)

    def lam_of(v):
        return cx.wrap(a, v) if cx.topology == TORUS else (0, 0)

    kept_keys = {v: (("k", v, a), lam_of(v)) for v in rim}
    kept_pts = {v: registry.get(*kept_keys[v]) for v in rim}
    okey = (("go", tag, 0), (0, 0))
    o = registry.put(okey[0], geo.centroid([kept_pts[v] for v in rim]))

    out = []
    for i in range(4):
        v, w = rim[i], rim[(i + 1) % 4]
        keyed = [
            (okey, o),
            (kept_keys[v], kept_pts[v]),
            ((("t", v, w), lam_of(v)), registry.get(("t", v, w), lam_of(v))),
            ((("t", w, v), lam_of(w)), registry.get(("t", w, v), lam_of(w))),
            (kept_keys[w], kept_pts[w]),
        ]
        out.append(_mk_polygon(f"{tag}:pent:{v}-{w}", GADGET_PENTAGON, keyed,
                               meta={"gadget": tag, "pair": (v, w),
                                     "rim_circles": tuple(rim)}))
    return out


def apply_bowtie_gadget(packing, cx, gadget, params=PatchParams(),
                        registry=None, rings=None, tag="gad"):
    """Four pentagons plus the barrel hexagon for a removed center pair."""
    a, b = gadget.centers
    c, d, e, f = gadget.rim
    registry, rings = _ensure_context(packing, cx, params, registry, rings)
    run = tuple(sorted((a, b)))

    def lam_of(v):
        if cx.topology != TORUS:
            return (0, 0)
        if v in (c, d, f):
            return cx.wrap(a, v)
        return _lam_plus(cx.wrap(a, b), cx.wrap(b, v))

    j_c = (_gap_item_next_to(rings, d, c, run), lam_of(d))    # d's c-side point
    j_e = (_gap_item_next_to(rings, d, e, run), lam_of(d))
    l_c = (_gap_item_next_to(rings, f, c, run), lam_of(f))
    l_e = (_gap_item_next_to(rings, f, e, run), lam_of(f))
    k_c = ((("k", c, a)), lam_of(c))
    k_e = ((("k", e, b)), lam_of(e))

    def pt(fk):
        return registry.get(fk[0], fk[1])

    o1key = (("go", tag, 0), (0, 0))
    o2key = (("go", tag, 1), (0, 0))
    o1 = registry.put(o1key[0], geo.centroid([pt(k_c), pt(j_c), pt(l_c)]))
    o2 = registry.put(o2key[0], geo.centroid([pt(j_e), pt(k_e), pt(l_e)]))

    def tang(u, w):
        return ((("t", u, w), lam_of(u)), registry.get(("t", u, w), lam_of(u)))

    pents = [
        (f"{tag}:pent:{c}-{d}", [(o1key, o1), (k_c, pt(k_c)), tang(c, d),
                                 tang(d, c), (j_c, pt(j_c))]),
        (f"{tag}:pent:{d}-{e}", [(o2key, o2), (j_e, pt(j_e)), tang(d, e),
                                 tang(e, d), (k_e, pt(k_e))]),
        (f"{tag}:pent:{e}-{f}", [(o2key, o2), (k_e, pt(k_e)), tang(e, f),
                                 tang(f, e), (l_e, pt(l_e))]),
        (f"{tag}:pent:{f}-{c}", [(o1key, o1), (l_c, pt(l_c)), tang(f, c),
                                 tang(c, f), (k_c, pt(k_c))]),
    ]
    rim = (c, d, e, f)
    out = [_mk_polygon(pid, GADGET_PENTAGON, keyed,
                       meta={"gadget": tag, "rim_circles": rim})
           for pid, keyed in pents]
    hex_keyed = [(o1key, o1), (j_c, pt(j_c)), (j_e, pt(j_e)),
                 (o2key, o2), (l_e, pt(l_e)), (l_c, pt(l_c))]
    out.append(_mk_polygon(f"{tag}:hex", BARREL_HEXAGON, hex_keyed,
                           meta={"gadget": tag, "rim_circles": rim,
                                 "waist_keys": (o1key, o2key)}))
    return out


def _lam_plus(w1, w2):
    return (w1[0] + w2[0], w1[1] + w2[1])


def _rim_cycle(cx, gadget):
    a = gadget.centers[0]
    order, closed = cx.link(a)
    if not closed or len(order) != 4:
        raise GadgetGeometryError(f"square gadget center {a} link is not a 4-cycle")
    return order


def _ensure_context(packing, cx, params, registry, rings):
    if registry is not None and rings is not None:
        return registry, rings
    removed = cx.gadget_centers()
    registry = _PointRegistry(packing, cx, params)
    rings = {}
    for v in cx.vertex_ids:
        if v in removed:
            continue
        items = _ring_items(packing, cx, v, removed, params)
        rings[v] = items
        registry.put_ring(v, items)
    return registry, rings


# -- regularity ----------------------------------------------------------------


def csm(points):
    """Continuous symmetry measure: normalized mean squared displacement to
    the closest regular polygon (zero iff regular)."""
    n = len(points)
    if n < 3:
        raise ValueError("need at least 3 vertices")
    z = np.array([p[0] + 1j * p[1] for p in points])
    z = z - z.mean()
    spread = math.sqrt(float((np.abs(z) ** 2).mean()))
    if spread < 1e-12:
        raise DegeneratePolygon("polygon has no spread")
    z = z / spread
    idx = np.arange(n)
    omega = np.exp(2j * math.pi * idx / n)
    best = math.inf
    for oriented in (z, z[::-1]):
        for shift in range(n):
            w = np.roll(oriented, shift)
            q = (w * np.conj(omega)).mean()
            displacement = float((np.abs(w - q * omega) ** 2).mean())
            if displacement < best:
                best = displacement
    return best


def patch_error(patch: Patch):
    """Mean filler-pentagon deviation from regularity."""
    fillers = patch.fillers()
    if not fillers:
        return math.inf
    return sum(csm(p.points) for p in fillers) / len(fillers)


def optimize_tau(packing: Packing, cx: Complex, sweep=(0.5, 0.95, 0.005),
                 tau_mode=SCALE):
    """Scan the shrink parameter and score mean pentagon regularity.

    Returns (best tau, [(tau, error), ...]); tau values whose patch cannot
    be built score infinity.
    """
    lo, hi, step = sweep
    taus = []
    t = lo
    while t <= hi + 1e-12:
        taus.append(round(t, 10))
        t += step
    curve = []
    for tau in taus:
        try:
            patch = build_patch(packing, cx, PatchParams(tau=tau, tau_mode=tau_mode))
            err = patch_error(patch)
        except Exception:
            err = math.inf
        curve.append((tau, err))
    best = min(curve, key=lambda te: (te[1], te[0]))
    return best[0], curve
