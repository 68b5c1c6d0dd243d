"""Built-in demo complexes used by the CLI, tests, and example scripts."""

from __future__ import annotations

import math

import numpy as np

from .complexes import Complex, GadgetAnnotation, BOWTIE, SQUARE, TORUS


def flower(k):
    """Hub vertex 0 surrounded by a cycle of k rim vertices."""
    if k < 3:
        raise ValueError("flower needs k >= 3")
    hints = {0: (0.0, 0.0)}
    for i in range(1, k + 1):
        a = 2.0 * math.pi * (i - 1) / k
        hints[i] = (math.cos(a), math.sin(a))
    triangles = [(0, i, i % k + 1) for i in range(1, k + 1)]
    return Complex(hints, triangles)


def hex_disk(rings=2):
    """Hexagonal chunk of the triangular lattice; rings=2 gives 19 vertices
    with 7 interior degree-6 vertices (the symmetric sweep test complex)."""
    ids = {}
    hints = {}
    idx = 0
    for q in range(-rings, rings + 1):
        for r in range(-rings, rings + 1):
            if abs(q + r) > rings:
                continue
            ids[(q, r)] = idx
            hints[idx] = (q + 0.5 * r, r * math.sqrt(3.0) / 2.0)
            idx += 1
    triangles = []
    for (q, r), i in ids.items():
        a = ids.get((q + 1, r))
        b = ids.get((q, r + 1))
        c = ids.get((q + 1, r - 1))
        if a is not None and b is not None:
            triangles.append((i, a, b))
        if a is not None and c is not None:
            triangles.append((i, c, a))
    return Complex(hints, triangles)


def grid_with_gadgets(cells=4, seed=7, p_square=0.25, p_bowtie=0.25):
    """Square grid where each cell gets a diagonal, a square gadget, or a
    bowtie gadget at random; the interior stays gadget-rich while boundary
    cells keep plain diagonals so the trim has something to discard."""
    rng = np.random.default_rng(seed)
    n = cells + 1
    hints = {}
    vid = {}
    k = 0
    for i in range(n):
        for j in range(n):
            vid[(i, j)] = k
            hints[k] = (float(i), float(j))
            k += 1
    triangles = []
    gadgets = []

    def diagonal_cell(i, j):
        c00, c10 = vid[(i, j)], vid[(i + 1, j)]
        c01, c11 = vid[(i, j + 1)], vid[(i + 1, j + 1)]
        # radiate diagonals away from the grid center so corner vertices
        # keep degree >= 3
        if (i < cells / 2) == (j < cells / 2):
            triangles.extend([(c00, c10, c11), (c00, c11, c01)])
        else:
            triangles.extend([(c00, c10, c01), (c10, c11, c01)])

    for i in range(cells):
        for j in range(cells):
            interior_cell = 0 < i < cells - 1 and 0 < j < cells - 1
            roll = rng.random()
            c00, c10 = vid[(i, j)], vid[(i + 1, j)]
            c01, c11 = vid[(i, j + 1)], vid[(i + 1, j + 1)]
            if interior_cell and roll < p_square:
                a = k
                hints[k] = (i + 0.5, j + 0.5)
                k += 1
                triangles.extend([(c00, c10, a), (c10, c11, a),
                                  (c11, c01, a), (c01, c00, a)])
                gadgets.append(GadgetAnnotation(SQUARE, (a,),
                                                (c10, c11, c01, c00)))
            elif interior_cell and roll < p_square + p_bowtie:
                a, b = k, k + 1
                hints[a] = (i + 0.35, j + 0.45)
                hints[b] = (i + 0.65, j + 0.55)
                k += 2
                triangles.extend([(a, c00, c10), (a, c10, b), (a, b, c01),
                                  (a, c01, c00), (b, c10, c11), (b, c11, c01)])
                gadgets.append(GadgetAnnotation(BOWTIE, (a, b),
                                                (c00, c10, c11, c01)))
            else:
                diagonal_cell(i, j)
    return Complex(hints, triangles, gadgets=gadgets)


def torus_hex(n=3, m=3):
    """Hexagonal-combinatorics torus: an n x m quotient of the triangular
    lattice, every vertex of degree 6. Needs n, m >= 3 to stay simple."""
    if n < 3 or m < 3:
        raise ValueError("torus grid needs n, m >= 3 to avoid parallel edges")

    def vid(i, j):
        return (i % n) * m + (j % m)

    hints = {}
    for i in range(n):
        for j in range(m):
            hints[vid(i, j)] = (2.0 * i + j, j * math.sqrt(3.0))
    triangles = []
    wraps = {}

    def add_edge(i1, j1, i2, j2):
        u, v = vid(i1, j1), vid(i2, j2)
        if (u, v) in wraps or (v, u) in wraps:
            return
        wraps[(u, v)] = (i2 // n - i1 // n, j2 // m - j1 // m)

    for i in range(n):
        for j in range(m):
            triangles.append((vid(i, j), vid(i + 1, j), vid(i, j + 1)))
            triangles.append((vid(i + 1, j), vid(i + 1, j + 1), vid(i, j + 1)))
            add_edge(i, j, i + 1, j)
            add_edge(i, j, i, j + 1)
            add_edge(i + 1, j, i, j + 1)
    return Complex(hints, triangles, TORUS, wraps)


def two_cluster():
    """A large and a small hex disk glued along one boundary edge.

    With trim depth 1 the survivors split into two components (7 vertices
    vs 1), exercising the keep-the-largest-component rule.
    """
    big = hex_disk(3)
    small = hex_disk(2)

    def first_boundary_edge(cx):
        dirs = set()
        for t in cx.triangles:
            for i in range(3):
                dirs.add((t[i], t[(i + 1) % 3]))
        for (u, v) in sorted(dirs):
            if (v, u) not in dirs:
                return (u, v)
        raise ValueError("no boundary")

    a, b = first_boundary_edge(big)
    c, d = first_boundary_edge(small)
    # identify d->a and c->b so the shared edge is traversed oppositely
    next_id = max(big.vertex_ids) + 1
    remap = {}
    hints = dict(big.hints)
    for v in small.vertex_ids:
        if v == d:
            remap[v] = a
        elif v == c:
            remap[v] = b
        else:
            remap[v] = next_id
            h = small.hints[v]
            hints[next_id] = (h[0] + 10.0, h[1])
            next_id += 1
    triangles = list(big.triangles)
    triangles.extend(tuple(remap[x] for x in t) for t in small.triangles)
    return Complex(hints, triangles)


DEMOS = {
    "flower5": lambda: flower(5),
    "flower6": lambda: flower(6),
    "flower8": lambda: flower(8),
    "hexdisk": lambda: hex_disk(2),
    "hexdisk3": lambda: hex_disk(3),
    "gadget-grid": lambda: grid_with_gadgets(5, seed=7),
    "torus-hex": lambda: torus_hex(3, 3),
}

# per-demo parameter overrides applied by the CLI unless the user passes
# explicit flags (flowers have no interior left at trim depth 1)
DEMO_DEFAULTS = {
    "flower5": {"trim_depth": 0},
    "flower6": {"trim_depth": 0},
    "flower8": {"trim_depth": 0},
    "hexdisk": {"trim_depth": 1},
    "hexdisk3": {"trim_depth": 1},
    "gadget-grid": {"trim_depth": 1},
    "torus-hex": {},
}


def demo(name):
    if name not in DEMOS:
        raise KeyError(f"unknown demo {name!r}; have {sorted(DEMOS)}")
    return DEMOS[name]()
