"""Triangulated input complexes: validation, Delaunay generation, file format.

A complex is purely combinatorial as far as the solver is concerned; vertex
hint positions are carried only for authoring tools. Torus complexes tag each
directed edge with an integer wrap vector counting fundamental-domain
crossings, and must be simple (no self-loops or parallel edges, which the
pair-based file format cannot express).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import DegenerateInput, ParseError

DISK = "disk"
TORUS = "torus"

SQUARE = "square"
BOWTIE = "bowtie"


@dataclass(frozen=True)
class GadgetAnnotation:
    """Labelled subgraph marking local patch surgery.

    ``centers`` holds one vertex for a square gadget, two for a bowtie.
    ``rim`` is the surrounding cycle: the center's link for a square;
    ``(c, d, e, f)`` with ``d`` and ``f`` the split-arc vertices for a bowtie.
    """

    kind: str
    centers: tuple
    rim: tuple

    def __post_init__(self):
        object.__setattr__(self, "centers", tuple(self.centers))
        object.__setattr__(self, "rim", tuple(self.rim))


@dataclass(frozen=True)
class Violation:
    code: str
    message: str
    where: tuple = ()

    def to_dict(self):
        return {"code": self.code, "message": self.message, "where": list(self.where)}


class ValidationReport(list):
    """List of violations; empty means the complex is valid."""

    def ok(self):
        return not self

    def to_list(self):
        return [v.to_dict() for v in self]

    def __str__(self):
        return "; ".join(v.message for v in self) if self else "ok"


def _normalize_triangle(tri):
    a, b, c = tri
    m = min(tri)
    while tri[0] != m:
        tri = (tri[1], tri[2], tri[0])
    return tri


class Complex:
    """Immutable triangulated 2-complex with optional gadget annotations."""

    def __init__(self, vertices, triangles, topology=DISK, wraps=None, gadgets=()):
        if isinstance(vertices, dict):
            items = vertices.items()
        else:
            items = ((v, None) if not isinstance(v, tuple) else v for v in vertices)
        self.hints = {int(v): (None if h is None else (float(h[0]), float(h[1])))
                      for v, h in items}
        self.vertex_ids = tuple(sorted(self.hints))
        self.triangles = tuple(sorted(
            _normalize_triangle((int(a), int(b), int(c))) for a, b, c in triangles))
        self.topology = topology
        self.gadgets = tuple(gadgets)
        self._wraps = {}
        if wraps:
            for (u, v), w in dict(wraps).items():
                self._wraps[(int(u), int(v))] = (int(w[0]), int(w[1]))
                self._wraps[(int(v), int(u))] = (-int(w[0]), -int(w[1]))

    # -- basic structure ---------------------------------------------------

    @cached_property
    def edges(self):
        """Undirected edges as sorted (u, v) tuples, sorted."""
        es = set()
        for a, b, c in self.triangles:
            es.update({tuple(sorted((a, b))), tuple(sorted((b, c))),
                       tuple(sorted((c, a)))})
        return tuple(sorted(es))

    @cached_property
    def _edge_triangle_count(self):
        count = {}
        for t in self.triangles:
            a, b, c = t
            for e in ((a, b), (b, c), (c, a)):
                key = tuple(sorted(e))
                count[key] = count.get(key, 0) + 1
        return count

    @cached_property
    def _succ(self):
        """Rotation system: succ[v][a] = b for every triangle (v, a, b)."""
        succ = {v: {} for v in self.vertex_ids}
        for t in self.triangles:
            for i in range(3):
                v, a, b = t[i], t[(i + 1) % 3], t[(i + 2) % 3]
                succ[v][a] = b
        return succ

    @cached_property
    def directed_triangle(self):
        """Map directed edge (u, v) -> ccw triangle (u, v, w) containing it."""
        out = {}
        for t in self.triangles:
            a, b, c = t
            out[(a, b)] = (a, b, c)
            out[(b, c)] = (b, c, a)
            out[(c, a)] = (c, a, b)
        return out

    @cached_property
    def _neighbor_map(self):
        nb = {v: set() for v in self.vertex_ids}
        for u, v in self.edges:
            nb[u].add(v)
            nb[v].add(u)
        return nb

    def neighbors(self, v):
        return sorted(self._neighbor_map[v])

    def degree(self, v):
        return len(self._neighbor_map[v])

    @cached_property
    def _links(self):
        links = {}
        for v in self.vertex_ids:
            links[v] = _trace_link(self._succ[v])
        return links

    def link(self, v):
        """(ordered ccw neighbor list, closed) for a manifold vertex.

        Raises ValueError if the link is broken; run validate() first on
        untrusted input.
        """
        order, closed, okay = self._links[v]
        if not okay:
            raise ValueError(f"vertex {v} has a non-manifold link")
        return order, closed

    @cached_property
    def boundary_vertices(self):
        return frozenset(v for v in self.vertex_ids
                         if self._links[v][2] and not self._links[v][1])

    @cached_property
    def interior_vertices(self):
        return frozenset(v for v in self.vertex_ids
                         if self._links[v][2] and self._links[v][1])

    def wrap(self, u, v):
        if self.topology != TORUS:
            return (0, 0)
        return self._wraps[(u, v)]

    @property
    def wraps(self):
        """Canonical-direction wrap dict (u < v)."""
        return {e: self._wraps[e] for e in self.edges} if self.topology == TORUS else {}

    def gadget_centers(self):
        out = set()
        for g in self.gadgets:
            out.update(g.centers)
        return out

    def __eq__(self, other):
        if not isinstance(other, Complex):
            return NotImplemented
        return (self.topology == other.topology
                and self.hints == other.hints
                and self.triangles == other.triangles
                and self.wraps == other.wraps
                and self.gadgets == other.gadgets)

    def __hash__(self):
        return hash((self.topology, self.triangles))

    def __repr__(self):
        return (f"Complex({self.topology}, {len(self.vertex_ids)} vertices, "
                f"{len(self.triangles)} triangles, {len(self.gadgets)} gadgets)")


def _trace_link(succ_v):
    """Order a vertex star from its succ pointers.

    Returns (ordered neighbors, closed, okay): a single cycle (closed) for
    interior vertices, a single open chain for boundary vertices, okay=False
    when the star is pinched or branched.
    """
    if not succ_v:
        return (), False, False
    targets = set(succ_v.values())
    sources = set(succ_v)
    starts = sources - targets
    if len(starts) == 0:
        start = next(iter(sorted(sources)))
        closed = True
    elif len(starts) == 1:
        start = starts.pop()
        closed = False
    else:
        return (), False, False
    order = [start]
    cur = start
    while cur in succ_v:
        cur = succ_v[cur]
        if cur == start:
            break
        if cur in order:
            return (), False, False
        order.append(cur)
    covered = set(order) == (sources | targets)
    if closed and cur != start:
        covered = False
    return tuple(order), closed, covered


# -- validation -------------------------------------------------------------


def validate(cx: Complex) -> ValidationReport:
    """Check every structural invariant; violations are data, not errors."""
    report = ValidationReport()
    seen_tri = set()
    ids = set(cx.vertex_ids)

    for t in cx.triangles:
        if len(set(t)) != 3:
            report.append(Violation("degenerate-triangle",
                                    f"triangle {t} repeats a vertex", t))
            continue
        for v in t:
            if v not in ids:
                report.append(Violation("unknown-vertex",
                                        f"triangle {t} references unknown vertex {v}", t))
        key = frozenset(t)
        if key in seen_tri:
            report.append(Violation("duplicate-triangle",
                                    f"triangle {t} duplicated", t))
        seen_tri.add(key)
    if report:
        return report

    in_triangle = set()
    for t in cx.triangles:
        in_triangle.update(t)
    for v in cx.vertex_ids:
        if v not in in_triangle:
            report.append(Violation("isolated-vertex",
                                    f"vertex {v} belongs to no triangle", (v,)))

    directed = {}
    for t in cx.triangles:
        a, b, c = t
        for e in ((a, b), (b, c), (c, a)):
            if e in directed:
                report.append(Violation(
                    "orientation",
                    f"directed edge {e} appears twice; orientation inconsistent "
                    f"or edge shared by >2 triangles", e))
            directed[e] = t

    for e, n in cx._edge_triangle_count.items():
        if n > 2:
            report.append(Violation("edge-count",
                                    f"edge {e} lies in {n} triangles", e))
        if cx.topology == TORUS and n != 2:
            report.append(Violation("edge-count",
                                    f"torus edge {e} lies in {n} triangles, wants 2", e))
    if report:
        return report

    for v in cx.vertex_ids:
        order, closed, okay = cx._links[v]
        if not okay:
            report.append(Violation(
                "pinch", f"not simply connected / pinch vertex {v}", (v,)))
        elif cx.topology == TORUS and not closed:
            report.append(Violation(
                "torus-boundary", f"torus vertex {v} lies on a boundary", (v,)))

    # connectivity over the triangle adjacency graph
    if cx.triangles:
        comp = {cx.triangles[0]}
        stack = [cx.triangles[0]]
        by_edge = {}
        for t in cx.triangles:
            for i in range(3):
                e = tuple(sorted((t[i], t[(i + 1) % 3])))
                by_edge.setdefault(e, []).append(t)
        while stack:
            t = stack.pop()
            for i in range(3):
                e = tuple(sorted((t[i], t[(i + 1) % 3])))
                for t2 in by_edge[e]:
                    if t2 not in comp:
                        comp.add(t2)
                        stack.append(t2)
        if len(comp) != len(cx.triangles):
            report.append(Violation("disconnected",
                                    "triangle set is not edge-connected", ()))

    V = len(cx.vertex_ids)
    E = len(cx.edges)
    F = len(cx.triangles)
    euler = V - E + F
    want = 1 if cx.topology == DISK else 0
    if euler != want:
        report.append(Violation(
            "euler", f"V-E+F = {euler}, expected {want} for {cx.topology}", ()))

    if cx.topology == DISK and not report:
        boundary_edges = [e for e, n in cx._edge_triangle_count.items() if n == 1]
        loops = _count_boundary_loops(boundary_edges)
        if loops != 1:
            report.append(Violation(
                "boundary", f"boundary forms {loops} loops, expected 1", ()))

    if cx.topology == TORUS:
        for e in cx.edges:
            if e not in cx._wraps:
                report.append(Violation("wraps-missing",
                                        f"edge {e} has no wrap tag", e))
        if not report:
            for t in cx.triangles:
                a, b, c = t
                s = tuple(map(sum, zip(cx.wrap(a, b), cx.wrap(b, c), cx.wrap(c, a))))
                if s != (0, 0):
                    report.append(Violation(
                        "wraps-sum",
                        f"inconsistent wraps: triangle {t} wrap sum {s} != (0, 0)", t))

    if not report:
        _validate_gadgets(cx, report)
    return report


def _count_boundary_loops(boundary_edges):
    if not boundary_edges:
        return 0
    adj = {}
    for u, v in boundary_edges:
        adj.setdefault(u, set()).add(v)
        adj.setdefault(v, set()).add(u)
    if any(len(s) != 2 for s in adj.values()):
        return -1
    seen = set()
    loops = 0
    for start in sorted(adj):
        if start in seen:
            continue
        loops += 1
        cur, prev = start, None
        while True:
            seen.add(cur)
            nxts = [w for w in adj[cur] if w != prev]
            prev, cur = cur, nxts[0]
            if cur == start:
                break
    return loops


def _validate_gadgets(cx, report):
    all_centers = []
    all_rims = set()
    for gi, g in enumerate(cx.gadgets):
        loc = (gi,)
        ids = set(cx.vertex_ids)
        missing = [v for v in (*g.centers, *g.rim) if v not in ids]
        if missing:
            report.append(Violation(
                "gadget-unknown-vertex",
                f"gadget {gi} references unknown vertex {missing[0]}", loc))
            continue
        if g.kind == SQUARE:
            _validate_square(cx, gi, g, report)
        elif g.kind == BOWTIE:
            _validate_bowtie(cx, gi, g, report)
        else:
            report.append(Violation("gadget-kind",
                                    f"gadget {gi} has unknown kind {g.kind!r}", loc))
            continue
        all_centers.extend(g.centers)
        all_rims.update(g.rim)
    if len(all_centers) != len(set(all_centers)):
        report.append(Violation("gadget-overlap",
                                "gadget center vertices are not disjoint", ()))
    shared = set(all_centers) & all_rims
    if shared:
        report.append(Violation(
            "gadget-overlap",
            f"vertex {sorted(shared)[0]} is both a gadget center and a rim vertex", ()))


def _validate_square(cx, gi, g, report):
    loc = (gi,)
    if len(g.centers) != 1 or len(g.rim) != 4:
        report.append(Violation("gadget-shape",
                                f"square gadget {gi} wants 1 center and 4 rim vertices",
                                loc))
        return
    a = g.centers[0]
    order, closed, okay = cx._links[a]
    if not okay or not closed:
        report.append(Violation("gadget-interior",
                                f"square gadget {gi} center {a} is not interior", loc))
        return
    if len(order) != 4:
        report.append(Violation(
            "gadget-degree",
            f"gadget degree constraint: square center {a} has degree "
            f"{len(order)}, wants 4", loc))
        return
    if set(g.rim) != set(order):
        report.append(Violation("gadget-rim",
                                f"square gadget {gi} rim does not match the link of {a}",
                                loc))
        return
    if not _is_rotation(g.rim, order):
        report.append(Violation("gadget-rim-order",
                                f"square gadget {gi} rim is not in link cycle order", loc))


def _validate_bowtie(cx, gi, g, report):
    loc = (gi,)
    if len(g.centers) != 2 or len(g.rim) != 4:
        report.append(Violation("gadget-shape",
                                f"bowtie gadget {gi} wants 2 centers and 4 rim vertices",
                                loc))
        return
    a, b = g.centers
    c, d, e, f = g.rim
    for v in (a, b):
        order, closed, okay = cx._links[v]
        if not okay or not closed:
            report.append(Violation("gadget-interior",
                                    f"bowtie gadget {gi} center {v} is not interior",
                                    loc))
            return
        if len(order) != 4:
            report.append(Violation(
                "gadget-degree",
                f"gadget degree constraint: bowtie center {v} has degree "
                f"{len(order)}, wants 4", loc))
            return
    link_a = set(cx._links[a][0])
    link_b = set(cx._links[b][0])
    if b not in link_a:
        report.append(Violation("gadget-rim",
                                f"bowtie gadget {gi} centers {a},{b} share no edge", loc))
        return
    shared = (link_a & link_b) - {a, b}
    if shared != {d, f}:
        report.append(Violation(
            "gadget-rim",
            f"bowtie gadget {gi} split-arc vertices {d},{f} do not match the "
            f"shared neighbors {sorted(shared)}", loc))
        return
    if link_a != {c, d, b, f} or link_b != {a, d, e, f}:
        report.append(Violation("gadget-rim",
                                f"bowtie gadget {gi} rim does not match center links",
                                loc))


def _is_rotation(seq, cycle):
    n = len(cycle)
    if len(seq) != n:
        return False
    for k in range(n):
        if all(seq[i] == cycle[(k + i) % n] for i in range(n)):
            return True
    return False


# -- Delaunay generation ------------------------------------------------------


def random_points(n, seed, low=0.0, high=1.0):
    """Seeded uniform points in a square, for generative designs."""
    rng = np.random.default_rng(seed)
    return [tuple(p) for p in rng.uniform(low, high, size=(n, 2))]


def delaunay_from_points(points, seed=0):
    """Delaunay triangulation as a disk complex with hint positions.

    Cocircular ties are broken toward the diagonal incident to the lowest
    vertex id so identical input always yields an identical complex. The
    ``seed`` argument only matters to callers who generated their points with
    ``random_points``; it is recorded nowhere.
    """
    del seed
    pts = [(float(x), float(y)) for x, y in points]
    if len(pts) < 3:
        raise DegenerateInput("need at least 3 points")
    if len(set(pts)) != len(pts):
        raise DegenerateInput("points must be distinct")
    arr = np.asarray(pts)
    if _collinear(arr):
        raise DegenerateInput("all points are collinear")

    from scipy.spatial import Delaunay  # deferred: scipy import is slow

    tri = Delaunay(arr)
    triangles = []
    for simplex in tri.simplices:
        a, b, c = (int(i) for i in simplex)
        if _orient(pts[a], pts[b], pts[c]) < 0:
            a, b = b, a
        triangles.append((a, b, c))
    triangles = _canonicalize_ties(pts, triangles)
    return Complex({i: pts[i] for i in range(len(pts))}, triangles, DISK)


def _collinear(arr):
    d = arr - arr[0]
    return np.linalg.matrix_rank(d, tol=1e-12) < 2


def _orient(a, b, c):
    return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])


def _incircle(a, b, c, d):
    """Positive when d lies inside the ccw circumcircle of (a, b, c)."""
    m = np.array([
        [a[0] - d[0], a[1] - d[1], (a[0] - d[0]) ** 2 + (a[1] - d[1]) ** 2],
        [b[0] - d[0], b[1] - d[1], (b[0] - d[0]) ** 2 + (b[1] - d[1]) ** 2],
        [c[0] - d[0], c[1] - d[1], (c[0] - d[0]) ** 2 + (c[1] - d[1]) ** 2],
    ])
    return float(np.linalg.det(m))


def _canonicalize_ties(pts, triangles):
    """Flip cocircular quads so their diagonal touches the lowest vertex id."""
    scale = max(1.0, max(abs(v) for p in pts for v in p))
    tol = 1e-9 * scale ** 4
    tris = {frozenset(t): t for t in triangles}
    changed = True
    rounds = 0
    while changed and rounds < 10:
        changed = False
        rounds += 1
        edge_map = {}
        for key, t in tris.items():
            a, b, c = t
            for e in ((a, b), (b, c), (c, a)):
                edge_map.setdefault(tuple(sorted(e)), []).append(t)
        for e, owners in sorted(edge_map.items()):
            if len(owners) != 2:
                continue
            t1, t2 = owners
            if frozenset(t1) not in tris or frozenset(t2) not in tris:
                continue
            u, v = e
            w1 = next(x for x in t1 if x not in e)
            w2 = next(x for x in t2 if x not in e)
            if abs(_incircle(pts[t1[0]], pts[t1[1]], pts[t1[2]], pts[w2])) > tol:
                continue  # strict Delaunay decision, leave it alone
            # cocircular: diagonal should touch the lowest id of the quad
            lowest = min(u, v, w1, w2)
            if lowest in e:
                continue
            if not _convex_quad(pts, u, w1, v, w2):
                continue
            del tris[frozenset(t1)]
            del tris[frozenset(t2)]
            na = (w1, w2, v) if _orient(pts[w1], pts[w2], pts[v]) > 0 else (w2, w1, v)
            nb = (w1, u, w2) if _orient(pts[w1], pts[u], pts[w2]) > 0 else (u, w1, w2)
            tris[frozenset(na)] = na
            tris[frozenset(nb)] = nb
            changed = True
    return sorted(_normalize_triangle(t) for t in tris.values())


def _convex_quad(pts, a, b, c, d):
    ring = (a, b, c, d)
    signs = []
    for i in range(4):
        p, q, r = pts[ring[i]], pts[ring[(i + 1) % 4]], pts[ring[(i + 2) % 4]]
        signs.append(_orient(p, q, r) > 0)
    return all(signs) or not any(signs)


# -- file format --------------------------------------------------------------


def serialize(cx: Complex) -> bytes:
    """Canonical UTF-8 JSON; equal complexes serialize to equal bytes."""
    doc = {"topology": cx.topology}
    verts = []
    for v in cx.vertex_ids:
        rec = {"id": v}
        hint = cx.hints[v]
        if hint is not None:
            rec["x"], rec["y"] = hint
        verts.append(rec)
    doc["vertices"] = verts
    doc["triangles"] = [list(t) for t in cx.triangles]
    if cx.topology == TORUS:
        doc["wraps"] = [{"from": u, "to": v, "wx": w[0], "wy": w[1]}
                        for (u, v), w in sorted(cx.wraps.items())]
    if cx.gadgets:
        doc["gadgets"] = [
            {"kind": g.kind, "centers": list(g.centers), "rim": list(g.rim)}
            for g in sorted(cx.gadgets, key=lambda g: (g.kind, g.centers))]
    return (json.dumps(doc, indent=2) + "\n").encode("utf-8")


_TOP_KEYS = {"topology", "vertices", "triangles", "wraps", "gadgets"}


def parse(text) -> Complex:
    """Parse and fully validate a complex document."""
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"syntax error at line {exc.lineno}: {exc.msg}") from exc
    if not isinstance(doc, dict):
        raise ParseError("document must be a JSON object")
    unknown = set(doc) - _TOP_KEYS
    if unknown:
        raise ParseError(f"unknown field {sorted(unknown)[0]!r}")

    topology = doc.get("topology", DISK)
    if topology not in (DISK, TORUS):
        raise ParseError(f"field 'topology': unknown value {topology!r}")

    verts = {}
    for rec in _expect_list(doc, "vertices"):
        if not isinstance(rec, dict) or "id" not in rec:
            raise ParseError("field 'vertices': each entry needs an 'id'")
        vid = rec["id"]
        if not isinstance(vid, int):
            raise ParseError(f"field 'vertices': id {vid!r} is not an integer")
        if vid in verts:
            raise ParseError(f"field 'vertices': duplicate id {vid}")
        hint = None
        if "x" in rec or "y" in rec:
            if "x" not in rec or "y" not in rec:
                raise ParseError(f"field 'vertices': vertex {vid} needs both x and y")
            hint = (float(rec["x"]), float(rec["y"]))
        extra = set(rec) - {"id", "x", "y"}
        if extra:
            raise ParseError(f"field 'vertices': unknown field {sorted(extra)[0]!r}")
        verts[vid] = hint

    triangles = []
    for t in _expect_list(doc, "triangles"):
        if not (isinstance(t, list) and len(t) == 3
                and all(isinstance(i, int) for i in t)):
            raise ParseError(f"field 'triangles': bad triangle {t!r}")
        for v in t:
            if v not in verts:
                raise ParseError(f"unknown vertex {v} in triangle {t}")
        triangles.append(tuple(t))

    wraps = {}
    if topology == TORUS:
        for rec in _expect_list(doc, "wraps"):
            try:
                u, v = int(rec["from"]), int(rec["to"])
                w = (int(rec["wx"]), int(rec["wy"]))
            except (KeyError, TypeError, ValueError) as exc:
                raise ParseError(f"field 'wraps': bad entry {rec!r}") from exc
            for x in (u, v):
                if x not in verts:
                    raise ParseError(f"unknown vertex {x} in wrap entry")
            if u == v:
                raise ParseError("field 'wraps': self-loop edges are not supported")
            if (u, v) in wraps or (v, u) in wraps:
                raise ParseError(f"field 'wraps': duplicate entry for edge ({u}, {v})")
            wraps[(u, v)] = w
    elif "wraps" in doc:
        raise ParseError("field 'wraps' is only valid for torus topology")

    gadgets = []
    for rec in doc.get("gadgets", []):
        try:
            g = GadgetAnnotation(rec["kind"], rec["centers"], rec["rim"])
        except (KeyError, TypeError) as exc:
            raise ParseError(f"field 'gadgets': bad entry {rec!r}") from exc
        for v in (*g.centers, *g.rim):
            if v not in verts:
                raise ParseError(f"unknown vertex {v} in gadget")
        gadgets.append(g)

    cx = Complex(verts, triangles, topology, wraps, gadgets)
    report = validate(cx)
    if not report.ok():
        raise ParseError(f"invalid complex: {report}", violations=report)
    return cx


def _expect_list(doc, key):
    val = doc.get(key)
    if not isinstance(val, list):
        raise ParseError(f"field {key!r} must be a list")
    return val
