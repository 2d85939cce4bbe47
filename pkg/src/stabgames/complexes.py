"""Chain complexes over GF(2), geometric cellulations, and plane graphs.

ChainComplex is the linear-algebra object (cell counts plus boundary
matrices); CellComplex keeps the geometric cell keys so that codes and
strategies can address cells by lattice coordinates.  Plane graphs are
given as rotation systems (cyclic order of outgoing darts at each vertex),
the minimal unambiguous planar-embedding format; faces are derived by
tracing and validated through Euler's formula.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Hashable, List, Sequence, Tuple

CellKey = Hashable


# -- GF(2) linear algebra on bit-packed rows --------------------------------


def gf2_rank(rows: Sequence[int]) -> int:
    work = [r for r in rows if r]
    rank = 0
    while work:
        row = work.pop()
        if row == 0:
            continue
        low = row & -row
        rank += 1
        work = [r ^ row if r & low else r for r in work]
    return rank


def gf2_rowspan_contains(rows: Sequence[int], vec: int) -> bool:
    basis: List[int] = []
    for r in rows:
        cur = r
        for b in basis:
            low = b & -b
            if cur & low:
                cur ^= b
        if cur:
            basis.append(cur)
    cur = vec
    for b in basis:
        low = b & -b
        if cur & low:
            cur ^= b
    return cur == 0


# -- chain complexes ---------------------------------------------------------


@dataclass(frozen=True)
class ChainComplex:
    """dims[k] = number of k-cells; boundary[k][i] = bitmask of (k-1)-cells
    on the boundary of the i-th k-cell (boundary[0] is all zeros)."""

    dims: Tuple[int, ...]
    boundary: Tuple[Tuple[int, ...], ...]

    def __post_init__(self):
        if len(self.boundary) != len(self.dims):
            raise ValueError("boundary list must match dims")
        for k, rows in enumerate(self.boundary):
            if len(rows) != self.dims[k]:
                raise ValueError(f"boundary[{k}] has wrong length")

    @property
    def top_dim(self) -> int:
        return len(self.dims) - 1

    def boundary_rank(self, k: int) -> int:
        """Rank of the boundary map C_k -> C_{k-1}; zero map outside range."""
        if k < 1 or k > self.top_dim:
            return 0
        return gf2_rank(self.boundary[k])

    def homology_dim(self, i: int) -> int:
        """dim H_i = dim ker d_i - rank d_{i+1} over GF(2)."""
        if i < 0 or i > self.top_dim:
            return 0
        ker = self.dims[i] - self.boundary_rank(i)
        return ker - self.boundary_rank(i + 1)

    def cohomology_dim(self, i: int) -> int:
        # over a field, dim H^i = dim H_i; computed independently via transposes
        if i < 0 or i > self.top_dim:
            return 0
        ker = self.dims[i] - self._coboundary_rank(i)
        return ker - self._coboundary_rank(i - 1)

    def _coboundary_rank(self, k: int) -> int:
        """Rank of delta_k = boundary_{k+1}^T : C_k -> C_{k+1}."""
        if k < 0 or k >= self.top_dim:
            return 0
        return self.boundary_rank(k + 1)

    def check_boundary_squares_to_zero(self) -> bool:
        for k in range(2, self.top_dim + 1):
            for cell in range(self.dims[k]):
                acc = 0
                mask = self.boundary[k][cell]
                j = 0
                while mask:
                    if mask & 1:
                        acc ^= self.boundary[k - 1][j]
                    mask >>= 1
                    j += 1
                if acc:
                    return False
        return True

    def euler_check(self) -> bool:
        chi_cells = sum((-1) ** i * d for i, d in enumerate(self.dims))
        chi_hom = sum((-1) ** i * self.homology_dim(i) for i in range(len(self.dims)))
        return chi_cells == chi_hom


# -- geometric cell complexes -------------------------------------------------


@dataclass
class CellComplex:
    """Cells carry hashable keys (lattice coordinates for torus builds)."""

    dim: int
    cells: Tuple[Tuple[CellKey, ...], ...]
    boundary_keys: Tuple[Tuple[Tuple[CellKey, ...], ...], ...]
    closed: bool
    meta: Dict = field(default_factory=dict)
    _index: Tuple[Dict[CellKey, int], ...] = None
    _cobound: Tuple[Dict[int, Tuple[int, ...]], ...] = None

    def __post_init__(self):
        self._index = tuple({key: i for i, key in enumerate(level)} for level in self.cells)
        chain = self.to_chain()
        if not chain.check_boundary_squares_to_zero():
            raise ValueError("boundary of boundary is nonzero")

    def index(self, k: int, key: CellKey) -> int:
        return self._index[k][key]

    def dims(self) -> Tuple[int, ...]:
        return tuple(len(level) for level in self.cells)

    def boundary_indices(self, k: int, i: int) -> Tuple[int, ...]:
        return tuple(self._index[k - 1][key] for key in self.boundary_keys[k][i])

    def coboundary_indices(self, k: int, i: int) -> Tuple[int, ...]:
        """Indices of (k+1)-cells whose boundary contains the i-th k-cell."""
        if self._cobound is None:
            cob: List[Dict[int, List[int]]] = [dict() for _ in range(self.dim + 1)]
            for kk in range(1, self.dim + 1):
                for ci in range(len(self.cells[kk])):
                    for low in self.boundary_indices(kk, ci):
                        cob[kk - 1].setdefault(low, []).append(ci)
            self._cobound = tuple(
                {i: tuple(v) for i, v in level.items()} for level in cob
            )
        return self._cobound[k].get(i, ())

    def to_chain(self) -> ChainComplex:
        dims = self.dims()
        boundary: List[Tuple[int, ...]] = [tuple(0 for _ in self.cells[0])]
        for k in range(1, self.dim + 1):
            rows = []
            for i in range(dims[k]):
                mask = 0
                for key in self.boundary_keys[k][i]:
                    mask ^= 1 << self._index[k - 1][key]
                rows.append(mask)
            boundary.append(tuple(rows))
        return ChainComplex(tuple(dims), tuple(boundary))


def dualize(c: CellComplex) -> CellComplex:
    """Dual complex of a closed manifold cellulation.

    Dual k-cells are primal (dim-k)-cells; the dual boundary of a primal
    cell is its primal coboundary.
    """
    if not c.closed:
        raise ValueError("dual complex requires a closed-manifold cellulation")
    d = c.dim
    cells = tuple(c.cells[d - k] for k in range(d + 1))
    boundary: List[Tuple[Tuple[CellKey, ...], ...]] = [tuple(() for _ in cells[0])]
    for k in range(1, d + 1):
        pk = d - k  # primal degree of the dual k-cells
        level = []
        for i in range(len(c.cells[pk])):
            ups = c.coboundary_indices(pk, i)
            level.append(tuple(c.cells[pk + 1][u] for u in ups))
        boundary.append(tuple(level))
    return CellComplex(d, cells, tuple(boundary), closed=True, meta={"dual_of": c.meta})


# -- torus builders ------------------------------------------------------------


def build_torus_2d(L: int, Ly: int = None) -> CellComplex:
    """Periodic square cellulation: vertices, edges (o=0 along +x, o=1 along +y),
    and plaquettes keyed by their lower-left corner.  Rectangular when Ly is given."""
    Lx = L
    if Ly is None:
        Ly = L
    if Lx < 2 or Ly < 2:
        raise ValueError("torus needs L >= 2")
    verts = [("v", x, y) for x in range(Lx) for y in range(Ly)]
    edges = [("e", x, y, o) for x in range(Lx) for y in range(Ly) for o in (0, 1)]
    faces = [("p", x, y) for x in range(Lx) for y in range(Ly)]

    def v(x, y):
        return ("v", x % Lx, y % Ly)

    def e(x, y, o):
        return ("e", x % Lx, y % Ly, o)

    e_bnd = []
    for (_, x, y, o) in edges:
        if o == 0:
            e_bnd.append((v(x, y), v(x + 1, y)))
        else:
            e_bnd.append((v(x, y), v(x, y + 1)))
    f_bnd = []
    for (_, x, y) in faces:
        f_bnd.append((e(x, y, 0), e(x, y + 1, 0), e(x, y, 1), e(x + 1, y, 1)))
    return CellComplex(
        2,
        (tuple(verts), tuple(edges), tuple(faces)),
        (tuple(() for _ in verts), tuple(e_bnd), tuple(f_bnd)),
        closed=True,
        meta={"lattice": "torus2d", "L": Lx, "Lx": Lx, "Ly": Ly},
    )


def build_torus_3d(L: int) -> CellComplex:
    """Periodic cubic cellulation; edges keyed by axis, faces by normal axis."""
    if L < 2:
        raise ValueError("torus needs L >= 2")
    rng = range(L)
    verts = [("v", x, y, z) for x in rng for y in rng for z in rng]
    edges = [("e", x, y, z, a) for x in rng for y in rng for z in rng for a in (0, 1, 2)]
    faces = [("f", x, y, z, m) for x in rng for y in rng for z in rng for m in (0, 1, 2)]
    cubes = [("c", x, y, z) for x in rng for y in rng for z in rng]

    def wrap(p):
        return (p[0] % L, p[1] % L, p[2] % L)

    def v(p):
        return ("v",) + wrap(p)

    def e(p, a):
        return ("e",) + wrap(p) + (a,)

    def f(p, m):
        return ("f",) + wrap(p) + (m,)

    def shift(p, a, amount=1):
        q = list(p)
        q[a] += amount
        return tuple(q)

    e_bnd = []
    for (_, x, y, z, a) in edges:
        p = (x, y, z)
        e_bnd.append((v(p), v(shift(p, a))))
    f_bnd = []
    for (_, x, y, z, m) in faces:
        p = (x, y, z)
        a, b = [ax for ax in (0, 1, 2) if ax != m]
        f_bnd.append((e(p, a), e(shift(p, b), a), e(p, b), e(shift(p, a), b)))
    c_bnd = []
    for (_, x, y, z) in cubes:
        p = (x, y, z)
        faces6 = []
        for m in (0, 1, 2):
            faces6.append(f(p, m))
            faces6.append(f(shift(p, m), m))
        c_bnd.append(tuple(faces6))
    return CellComplex(
        3,
        (tuple(verts), tuple(edges), tuple(faces), tuple(cubes)),
        (tuple(() for _ in verts), tuple(e_bnd), tuple(f_bnd), tuple(c_bnd)),
        closed=True,
        meta={"lattice": "torus3d", "L": L},
    )


# -- plane graphs ---------------------------------------------------------------


@dataclass
class PlaneGraph:
    """Graph with a rotation system.

    edges[i] = (u, v); rotation[vertex] = cyclic list of darts leaving it,
    a dart being (edge_id, end) with end 0 when the dart leaves edges[i][0].
    Faces are derived by tracing and cached; the embedding must be genus 0.
    """

    vertices: Tuple[Hashable, ...]
    edges: Tuple[Tuple[Hashable, Hashable], ...]
    rotation: Dict[Hashable, List[Tuple[int, int]]]
    _faces: Tuple[Tuple[Tuple[int, int], ...], ...] = None

    def __post_init__(self):
        for i, (u, v) in enumerate(self.edges):
            if u == v:
                raise ValueError(f"self-loop at edge {i}")
        darts = {(i, end) for i in range(len(self.edges)) for end in (0, 1)}
        seen = set()
        for v, ds in self.rotation.items():
            for d in ds:
                i, end = d
                if self.edges[i][end] != v:
                    raise ValueError(f"dart {d} does not leave vertex {v}")
                seen.add(d)
        if seen != darts:
            raise ValueError("rotation system must cover every dart exactly once")
        self._faces = self._trace_faces()
        if len(self.vertices) - len(self.edges) + len(self._faces) != 2:
            raise ValueError("rotation system is not a genus-0 (plane) embedding")

    def _next_dart(self, dart: Tuple[int, int]) -> Tuple[int, int]:
        i, end = dart
        head = self.edges[i][1 - end]
        rev = (i, 1 - end)
        ring = self.rotation[head]
        pos = ring.index(rev)
        return ring[(pos + 1) % len(ring)]

    def _trace_faces(self):
        remaining = {(i, end) for i in range(len(self.edges)) for end in (0, 1)}
        faces = []
        while remaining:
            start = min(remaining)
            cyc = []
            d = start
            while True:
                cyc.append(d)
                remaining.discard(d)
                d = self._next_dart(d)
                if d == start:
                    break
            faces.append(tuple(cyc))
        return tuple(faces)

    @property
    def faces(self) -> Tuple[Tuple[Tuple[int, int], ...], ...]:
        return self._faces

    def face_edge_sets(self) -> List[Tuple[int, ...]]:
        return [tuple(sorted({i for (i, _) in f})) for f in self._faces]

    def edge_faces(self) -> List[Tuple[int, int]]:
        """For each edge, the pair of face indices on its two sides."""
        where: Dict[Tuple[int, int], int] = {}
        for fi, f in enumerate(self._faces):
            for d in f:
                where[d] = fi
        return [(where[(i, 0)], where[(i, 1)]) for i in range(len(self.edges))]

    def dual_is_loopless(self) -> bool:
        return all(a != b for a, b in self.edge_faces())


def cycle_graph(p: int) -> PlaneGraph:
    """Cycle with p vertices and p edges; dual is the dipole graph."""
    if p < 2:
        raise ValueError("cycle needs >= 2 edges")
    verts = tuple(range(p))
    edges = tuple((i, (i + 1) % p) for i in range(p))
    rotation = {}
    for v in verts:
        incoming = ((v - 1) % p, 1)
        outgoing = (v, 0)
        rotation[v] = [outgoing, incoming]
    return PlaneGraph(verts, edges, rotation)


def dipole_graph(p: int) -> PlaneGraph:
    """Two vertices joined by p parallel edges; dual is the cycle graph."""
    if p < 2:
        raise ValueError("dipole needs >= 2 edges")
    verts = (0, 1)
    edges = tuple((0, 1) for _ in range(p))
    rotation = {
        0: [(i, 0) for i in range(p)],
        1: [(i, 1) for i in reversed(range(p))],
    }
    return PlaneGraph(verts, edges, rotation)


def wheel_graph(k: int) -> PlaneGraph:
    """Hub 0 joined to a k-cycle of rim vertices; self-dual for every k."""
    if k < 3:
        raise ValueError("wheel needs k >= 3 spokes")
    verts = tuple(range(k + 1))
    spokes = [(0, 1 + i) for i in range(k)]
    rim = [(1 + i, 1 + (i + 1) % k) for i in range(k)]
    edges = tuple(spokes + rim)
    rotation = {0: [(i, 0) for i in range(k)]}
    for i in range(k):
        v = 1 + i
        rotation[v] = [(i, 1), (k + (i - 1) % k, 1), (k + i, 0)]
    return PlaneGraph(verts, edges, rotation)


def random_stacked_triangulation(n_inserts: int, seed: int) -> PlaneGraph:
    """Random maximal plane graph grown by repeated vertex-in-triangle stacking."""
    import random as _random

    rng = _random.Random(seed)
    verts: List[Hashable] = [0, 1, 2]
    edges: List[Tuple[Hashable, Hashable]] = [(0, 1), (1, 2), (2, 0)]
    rotation: Dict[Hashable, List[Tuple[int, int]]] = {
        0: [(0, 0), (2, 1)],
        1: [(1, 0), (0, 1)],
        2: [(2, 0), (1, 1)],
    }
    for _ in range(n_inserts):
        g = PlaneGraph(tuple(verts), tuple(edges), {v: list(d) for v, d in rotation.items()})
        face = rng.choice(g.faces)
        if len(face) != 3:
            continue
        w = len(verts)
        verts.append(w)
        new_ids = []
        corner_darts = []
        for d in face:
            i, end = d
            corner = edges[i][end]
            new_ids.append(len(edges))
            edges.append((w, corner))
            corner_darts.append((d, corner))
        rotation[w] = [(ei, 0) for ei in reversed(new_ids)]
        for (d, corner), ei in zip(corner_darts, new_ids):
            ring = rotation[corner]
            pos = ring.index(d)
            ring.insert(pos, (ei, 1))
    return PlaneGraph(tuple(verts), tuple(edges), rotation)


def plane_graph_complex(g: PlaneGraph) -> Tuple[CellComplex, CellComplex]:
    """Sphere-like 2-complexes of a plane graph and of its geometric dual.

    Includes the unbounded face, so both complexes are cellulations of S^2;
    the face counts satisfy F + F* - 2 = E.
    """
    if not g.dual_is_loopless():
        raise ValueError("geometric dual has a self-loop (bridge in the graph)")
    face_sets = g.face_edge_sets()
    primal = CellComplex(
        2,
        (
            tuple(("v", v) for v in g.vertices),
            tuple(("e", i) for i in range(len(g.edges))),
            tuple(("f", i) for i in range(len(face_sets))),
        ),
        (
            tuple(() for _ in g.vertices),
            tuple((("v", u), ("v", v)) for (u, v) in g.edges),
            tuple(tuple(("e", i) for i in fs) for fs in face_sets),
        ),
        closed=True,
        meta={"kind": "plane_graph", "faces": len(face_sets)},
    )
    edge_faces = g.edge_faces()
    vert_edges = {v: [] for v in g.vertices}
    for i, (u, v) in enumerate(g.edges):
        vert_edges[u].append(i)
        vert_edges[v].append(i)
    dual = CellComplex(
        2,
        (
            tuple(("f", i) for i in range(len(face_sets))),
            tuple(("e", i) for i in range(len(g.edges))),
            tuple(("v", v) for v in g.vertices),
        ),
        (
            tuple(() for _ in face_sets),
            tuple((("f", a), ("f", b)) for (a, b) in edge_faces),
            tuple(tuple(("e", i) for i in vert_edges[v]) for v in g.vertices),
        ),
        closed=True,
        meta={"kind": "plane_graph_dual", "faces": len(g.vertices)},
    )
    return primal, dual


# -- text formats ------------------------------------------------------------------


def complex_to_text(c: CellComplex) -> str:
    """Line-oriented dump: `cells[k]` sections list cell keys, `boundary[k]`
    sections list the incident lower cells of each cell, one per line."""
    lines = [f"dim {c.dim}", f"closed {int(c.closed)}"]
    for k in range(c.dim + 1):
        lines.append(f"cells[{k}]")
        for key in c.cells[k]:
            lines.append(repr(key))
    for k in range(1, c.dim + 1):
        lines.append(f"boundary[{k}]")
        for bnd in c.boundary_keys[k]:
            lines.append("; ".join(repr(key) for key in bnd))
    return "\n".join(lines) + "\n"


def complex_from_text(text: str) -> CellComplex:
    import ast

    lines = [ln.rstrip() for ln in text.splitlines() if ln.strip()]
    dim = int(lines[0].split()[1])
    closed = bool(int(lines[1].split()[1]))
    cells: List[List[CellKey]] = [[] for _ in range(dim + 1)]
    boundary: List[List[Tuple[CellKey, ...]]] = [[] for _ in range(dim + 1)]
    section = None
    for ln in lines[2:]:
        if ln.startswith("cells["):
            section = ("cells", int(ln[6:-1]))
            continue
        if ln.startswith("boundary["):
            section = ("boundary", int(ln[9:-1]))
            continue
        kind, k = section
        if kind == "cells":
            cells[k].append(ast.literal_eval(ln))
        else:
            parts = [p for p in ln.split("; ") if p]
            boundary[k].append(tuple(ast.literal_eval(p) for p in parts))
    boundary[0] = [() for _ in cells[0]]
    return CellComplex(
        dim,
        tuple(tuple(level) for level in cells),
        tuple(tuple(level) for level in boundary),
        closed=closed,
    )


def plane_graph_to_text(g: PlaneGraph) -> str:
    """`edge i: u v` lines then `vertex v: dart list` rotation lines."""
    lines = []
    for i, (u, v) in enumerate(g.edges):
        lines.append(f"edge {i}: {u!r} {v!r}")
    for v in g.vertices:
        darts = " ".join(f"{i}.{end}" for (i, end) in g.rotation[v])
        lines.append(f"vertex {v!r}: {darts}")
    return "\n".join(lines) + "\n"


def plane_graph_from_text(text: str) -> PlaneGraph:
    import ast

    edges: List[Tuple[Hashable, Hashable]] = []
    rotation: Dict[Hashable, List[Tuple[int, int]]] = {}
    vertices: List[Hashable] = []
    for ln in text.splitlines():
        ln = ln.strip()
        if not ln:
            continue
        head, _, rest = ln.partition(":")
        if head.startswith("edge"):
            u, v = rest.split()
            edges.append((ast.literal_eval(u), ast.literal_eval(v)))
        else:
            v = ast.literal_eval(head[len("vertex "):])
            vertices.append(v)
            darts = []
            for tok in rest.split():
                i, end = tok.split(".")
                darts.append((int(i), int(end)))
            rotation[v] = darts
    return PlaneGraph(tuple(vertices), tuple(edges), rotation)
