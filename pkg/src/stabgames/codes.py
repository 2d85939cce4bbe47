"""Concrete stabilizer resource states.

Homological CSS codes from chain complexes, plus direct constructions of the
2D/3D toric codes, the X-cube model, and the qudit (d=4) double-semion model
with its string operators and exchange-statistics extraction.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from .complexes import CellComplex, build_torus_2d, build_torus_3d
from .pauli import PauliOperator
from .tableau import StabilizerGroup
from .weyl import WeylOperator, w_multiply

LabeledGenerator = Tuple[Tuple, object]


@dataclass
class CodeInstance:
    kind: str
    d: int
    n: int
    group: StabilizerGroup
    labeled_generators: Tuple[LabeledGenerator, ...]
    cell: Optional[CellComplex] = None
    qubit_degree: Optional[int] = None  # degree of the cells carrying qubits
    meta: Dict = field(default_factory=dict)

    def qubit_index(self, key) -> int:
        return self.cell.index(self.qubit_degree, key)

    def generators_by_label(self, label_head: str) -> List[LabeledGenerator]:
        return [(lab, g) for (lab, g) in self.labeled_generators if lab[0] == label_head]

    def violations(self, op, label_head: Optional[str] = None) -> List[Tuple]:
        """Labels of generators that fail to commute with op."""
        from .weyl import commutation_phase
        from .pauli import commutes

        out = []
        for lab, g in self.labeled_generators:
            if label_head is not None and lab[0] != label_head:
                continue
            if self.d == 2:
                if not commutes(g, op):
                    out.append(lab)
            else:
                if commutation_phase(g, op) != 0:
                    out.append(lab)
        return out


def code_info(code: CodeInstance) -> Dict:
    counts: Dict[str, int] = {}
    for lab, _ in code.labeled_generators:
        counts[lab[0]] = counts.get(lab[0], 0) + 1
    return {
        "kind": code.kind,
        "d": code.d,
        "n": code.n,
        "generator_counts": counts,
        "rank": code.group.rank,
        "redundancies": len(code.labeled_generators) - code.group.rank,
        "ground_space_log_dim": code.group.ground_space_log_dim(),
    }


# -- homological CSS ------------------------------------------------------------


def homological_css(cell: CellComplex, p: int) -> CodeInstance:
    """Qubits on p-cells; X stabilizers from (p+1)-cell boundaries, Z
    stabilizers from (p-1)-cell coboundaries.  Commutation is automatic
    from boundary-of-boundary = 0."""
    if not 1 <= p <= cell.dim - 1:
        raise ValueError(f"qubit degree p={p} outside 1..{cell.dim - 1}")
    n = len(cell.cells[p])
    gens: List[LabeledGenerator] = []
    for i in range(len(cell.cells[p + 1])):
        support = cell.boundary_indices(p + 1, i)
        op = PauliOperator.from_support(n, "X", support)
        gens.append((("xstab", cell.cells[p + 1][i]), op))
    for i in range(len(cell.cells[p - 1])):
        support = cell.coboundary_indices(p - 1, i)
        op = PauliOperator.from_support(n, "Z", support)
        gens.append((("zstab", cell.cells[p - 1][i]), op))
    group = StabilizerGroup([g for _, g in gens], d=2, n=n)
    return CodeInstance(
        kind=f"homological(p={p})",
        d=2,
        n=n,
        group=group,
        labeled_generators=tuple(gens),
        cell=cell,
        qubit_degree=p,
        meta={"p": p},
    )


def toric2d(L: int) -> CodeInstance:
    """2D toric code: qubits on edges, Z stars on vertices, X loops on plaquettes."""
    code = homological_css(build_torus_2d(L), 1)
    code.kind = "toric2d"
    code.meta["L"] = L
    return code


def toric3d_faces(L: int) -> CodeInstance:
    """3D toric code with qubits on faces: Z stabilizers on edges (elementary
    dual loops), X stabilizers on cubes (elementary membranes)."""
    code = homological_css(build_torus_3d(L), 2)
    code.kind = "toric3d_faces"
    code.meta["L"] = L
    return code


def toric3d_edges(L: int) -> CodeInstance:
    """Dual 3D toric code with qubits on edges: Z stars on vertices, X loops
    on faces."""
    code = homological_css(build_torus_3d(L), 1)
    code.kind = "toric3d_edges"
    code.meta["L"] = L
    return code


def toric2d_winding_z_fixers(code: CodeInstance) -> List[PauliOperator]:
    """Two winding dual Z loops whose fixing picks a unique 2D toric ground
    state: one crosses the vertical edges of a row, the other the horizontal
    edges of a column."""
    if code.kind != "toric2d":
        raise ValueError("winding fixers defined for the 2D toric code")
    L = code.meta["L"]
    row = PauliOperator.from_support(
        code.n, "Z", [code.qubit_index(("e", x, 0, 1)) for x in range(L)]
    )
    col = PauliOperator.from_support(
        code.n, "Z", [code.qubit_index(("e", 0, y, 0)) for y in range(L)]
    )
    return [row, col]


def star_operator(code: CodeInstance, key) -> PauliOperator:
    """The Z-type stabilizer labelled by a (p-1)-cell key."""
    for lab, g in code.labeled_generators:
        if lab == ("zstab", key):
            return g
    raise KeyError(key)


def loop_operator(code: CodeInstance, key) -> PauliOperator:
    """The X-type stabilizer labelled by a (p+1)-cell key."""
    for lab, g in code.labeled_generators:
        if lab == ("xstab", key):
            return g
    raise KeyError(key)


# -- X-cube ----------------------------------------------------------------------


def xcube(L: int) -> CodeInstance:
    """X-cube model: qubits on cubic-lattice edges; Z-type 12-edge cube
    operators and X-type 4-edge planar vertex crosses."""
    if L < 2:
        raise ValueError("X-cube needs L >= 2")
    cell = build_torus_3d(L)
    n = len(cell.cells[1])

    def e(p, a):
        return ("e", p[0] % L, p[1] % L, p[2] % L, a)

    def shift(p, a, amt=1):
        q = list(p)
        q[a] += amt
        return tuple(q)

    gens: List[LabeledGenerator] = []
    for x in range(L):
        for y in range(L):
            for z in range(L):
                p = (x, y, z)
                edges = []
                for a in (0, 1, 2):
                    b, c = [ax for ax in (0, 1, 2) if ax != a]
                    for db in (0, 1):
                        for dc in (0, 1):
                            q = shift(shift(p, b, db), c, dc)
                            edges.append(e(q, a))
                support = [cell.index(1, k) for k in edges]
                gens.append(
                    (("cube", x, y, z), PauliOperator.from_support(n, "Z", support))
                )
    for x in range(L):
        for y in range(L):
            for z in range(L):
                p = (x, y, z)
                for mu in (0, 1, 2):
                    edges = []
                    for a in (0, 1, 2):
                        if a == mu:
                            continue
                        edges.append(e(p, a))
                        edges.append(e(shift(p, a, -1), a))
                    support = [cell.index(1, k) for k in edges]
                    gens.append(
                        (
                            ("vertex", x, y, z, mu),
                            PauliOperator.from_support(n, "X", support),
                        )
                    )
    group = StabilizerGroup([g for _, g in gens], d=2, n=n)
    return CodeInstance(
        kind="xcube",
        d=2,
        n=n,
        group=group,
        labeled_generators=tuple(gens),
        cell=cell,
        qubit_degree=1,
        meta={"L": L},
    )


def xcube_membrane(code: CodeInstance, z_level: int, x_range, y_range) -> PauliOperator:
    """Rectangular dual membrane of X's on z-oriented edges at one level."""
    L = code.meta["L"]
    support = []
    for x in range(*x_range):
        for y in range(*y_range):
            support.append(code.qubit_index(("e", x % L, y % L, z_level % L, 2)))
    return PauliOperator.from_support(code.n, "X", support)


# -- double semion (d = 4) ---------------------------------------------------------


def _ds_edge_keys(Lx: int, Ly: int) -> List[Tuple]:
    return [("e", x, y, o) for x in range(Lx) for y in range(Ly) for o in (0, 1)]


@dataclass
class _DsLattice:
    Lx: int
    Ly: int
    index: Dict[Tuple, int]

    def h(self, x: int, y: int) -> int:
        """Horizontal edge from (x, y) to (x+1, y)."""
        return self.index[("e", x % self.Lx, y % self.Ly, 0)]

    def v(self, x: int, y: int) -> int:
        """Vertical edge from (x, y) to (x, y+1)."""
        return self.index[("e", x % self.Lx, y % self.Ly, 1)]


def _ds_lattice(code: CodeInstance) -> _DsLattice:
    if code.kind != "double_semion":
        raise ValueError("operation requires a double-semion code")
    return code.meta["lattice"]


def _weyl_from_factors(n: int, factors: Sequence[Tuple[int, int, int]], phase: int = 0) -> WeylOperator:
    """Single Weyl operator from per-site (site, x_exp, z_exp) with sites distinct."""
    xs = [0] * n
    zs = [0] * n
    for site, a, b in factors:
        xs[site] = (xs[site] + a) % 4
        zs[site] = (zs[site] + b) % 4
    return WeylOperator(4, n, tuple(xs), tuple(zs), phase)


def double_semion(Lx: int, Ly: int) -> CodeInstance:
    """Double-semion stabilizer model: four-dimensional qudits on the edges of
    a periodic square lattice.

    Vertex terms act on six edges with mixed shift/phase factors, plaquette
    terms are Z^2 loops, and edge terms couple X_e^2 to a neighboring Z^2;
    horizontal edges are oriented +x and vertical edges +y.  All generators
    are checked to commute at construction.
    """
    if Lx < 2 or Ly < 2:
        raise ValueError("double semion needs Lx, Ly >= 2")
    keys = _ds_edge_keys(Lx, Ly)
    index = {k: i for i, k in enumerate(keys)}
    lat = _DsLattice(Lx, Ly, index)
    n = len(keys)
    gens: List[LabeledGenerator] = []
    for x in range(Lx):
        for y in range(Ly):
            gens.append((("vertex", x, y), ds_vertex_operator_at(lat, n, x, y)))
    for x in range(Lx):
        for y in range(Ly):
            op = _weyl_from_factors(
                n,
                [
                    (lat.h(x, y), 0, 2),
                    (lat.h(x, y + 1), 0, 2),
                    (lat.v(x, y), 0, 2),
                    (lat.v(x + 1, y), 0, 2),
                ],
            )
            gens.append((("plaquette", x, y), op))
    for x in range(Lx):
        for y in range(Ly):
            op_h = _weyl_from_factors(n, [(lat.h(x, y), 2, 0), (lat.v(x, y - 1), 0, 2)])
            gens.append((("edge", x, y, 0), op_h))
            op_v = _weyl_from_factors(n, [(lat.v(x, y), 2, 0), (lat.h(x - 1, y), 0, 2)])
            gens.append((("edge", x, y, 1), op_v))
    group = StabilizerGroup([g for _, g in gens], d=4, n=n)
    code = CodeInstance(
        kind="double_semion",
        d=4,
        n=n,
        group=group,
        labeled_generators=tuple(gens),
        cell=None,
        qubit_degree=None,
        meta={"Lx": Lx, "Ly": Ly},
    )
    code.meta["lattice"] = lat
    return code


def ds_vertex_operator_at(lat: _DsLattice, n: int, x: int, y: int) -> WeylOperator:
    """Six-edge vertex term: X on the west and south edges, X^dag Z on the
    east edge, X^dag Z^dag on the north edge, Z^dag on the northeast
    horizontal edge, Z on the east vertical edge.

    Within-site factors are in canonical order (X part left of Z part) with
    no global phase; this is the unique phase choice (up to irrelevant even
    lattice sizes) for which the full set of vertex, plaquette and edge terms
    generates a consistent group at every torus size.
    """
    factors = [
        (lat.h(x - 1, y), 1, 0),
        (lat.h(x, y), 3, 1),
        (lat.v(x, y - 1), 1, 0),
        (lat.v(x, y), 3, 3),
        (lat.h(x, y + 1), 0, 3),
        (lat.v(x + 1, y), 0, 1),
    ]
    return _weyl_from_factors(n, factors, phase=0)


# Dual-path step factors for the semion string, keyed by step direction.
# A step moves between adjacent plaquettes; plaquette (x, y) has SW corner
# vertex (x, y).  Each factor is ((edge, x_exp, z_exp), (edge, x_exp, z_exp)).


def _ds_step_factors(lat: _DsLattice, px: int, py: int, direction: str, conj: bool):
    """Factors for one dual step leaving plaquette (px, py); conj swaps
    X <-> X^dag (the partner-anyon string)."""
    xa = 3 if conj else 1  # exponent used where the plain string applies X
    xb = 1 if conj else 3  # exponent used where the plain string applies X^dag
    if direction == "E":
        crossed = lat.v(px + 1, py)
        companion = lat.h(px + 1, py + 1)
        return [(crossed, xa, 0), (companion, 0, 1)]
    if direction == "W":
        crossed = lat.v(px, py)
        companion = lat.h(px, py + 1)
        return [(crossed, xb, 0), (companion, 0, 3)]
    if direction == "N":
        crossed = lat.h(px, py + 1)
        companion = lat.v(px + 1, py + 1)
        return [(crossed, xb, 0), (companion, 0, 1)]
    if direction == "S":
        crossed = lat.h(px, py)
        companion = lat.v(px + 1, py)
        return [(crossed, xa, 0), (companion, 0, 3)]
    raise ValueError(f"bad step direction {direction!r}")


def _dual_path_steps(path: Sequence[Tuple[int, int]], Lx: int, Ly: int):
    steps = []
    for (x0, y0), (x1, y1) in zip(path, path[1:]):
        dx = (x1 - x0) % Lx
        dy = (y1 - y0) % Ly
        if (dx, dy) == (1, 0):
            steps.append((x0, y0, "E"))
        elif (dx, dy) == (Lx - 1, 0):
            steps.append((x0, y0, "W"))
        elif (dx, dy) == (0, 1):
            steps.append((x0, y0, "N"))
        elif (dx, dy) == (0, Ly - 1):
            steps.append((x0, y0, "S"))
        else:
            raise ValueError(f"path not connected at {(x0, y0)} -> {(x1, y1)}")
    return steps


def ds_string(code: CodeInstance, kind: str, path: Sequence[Tuple[int, int]]) -> WeylOperator:
    """Anyon string operator along a directed path.

    kind "s" or "sbar": `path` is a list of plaquette coordinates (dual
    path); kind "ssbar": `path` is a list of vertex coordinates (direct
    path) and the string is the Z^2 boson string.  The ordering of steps
    fixes the overall phase: the first step is applied first.
    """
    lat = _ds_lattice(code)
    n = code.n
    if len(path) < 2:
        raise ValueError("path needs at least two sites")
    if kind in ("s", "sbar"):
        conj = kind == "sbar"
        acc = WeylOperator.identity(4, n)
        for px, py, direction in _dual_path_steps(path, lat.Lx, lat.Ly):
            step = _weyl_from_factors(n, _ds_step_factors(lat, px, py, direction, conj))
            acc = w_multiply(step, acc)
        return acc
    if kind == "ssbar":
        factors = []
        for (x0, y0), (x1, y1) in zip(path, path[1:]):
            dx = (x1 - x0) % lat.Lx
            dy = (y1 - y0) % lat.Ly
            if (dx, dy) == (1, 0):
                factors.append((lat.h(x0, y0), 0, 2))
            elif (dx, dy) == (lat.Lx - 1, 0):
                factors.append((lat.h(x1, y1), 0, 2))
            elif (dx, dy) == (0, 1):
                factors.append((lat.v(x0, y0), 0, 2))
            elif (dx, dy) == (0, lat.Ly - 1):
                factors.append((lat.v(x1, y1), 0, 2))
            else:
                raise ValueError(f"path not connected at {(x0, y0)} -> {(x1, y1)}")
        acc = WeylOperator.identity(4, n)
        for f in factors:
            acc = w_multiply(_weyl_from_factors(n, [f]), acc)
        return acc
    raise ValueError(f"unknown string kind {kind!r}")


def ds_winding_fixers(code: CodeInstance) -> List[WeylOperator]:
    """Two winding boson (Z^2) strings whose fixing selects a unique ground
    state out of the fourfold-degenerate torus ground space."""
    lat = _ds_lattice(code)
    horiz = [(x, 0) for x in range(lat.Lx)] + [(0, 0)]
    vert = [(0, y) for y in range(lat.Ly)] + [(0, 0)]
    return [ds_string(code, "ssbar", horiz), ds_string(code, "ssbar", vert)]


def ds_fixed_group(code: CodeInstance) -> StabilizerGroup:
    """Code group with both winding sectors pinned (unique ground state)."""
    return code.group.fix_sector(ds_winding_fixers(code))


def ds_vertex_loop(code: CodeInstance, x: int, y: int, counterclockwise: bool = True) -> WeylOperator:
    """Closed elementary dual loop of semion string around vertex (x, y)."""
    ring = [(x - 1, y - 1), (x, y - 1), (x, y), (x - 1, y), (x - 1, y - 1)]
    if not counterclockwise:
        ring = list(reversed(ring))
    return ds_string(code, "s", ring)


def exchange_statistics(code: CodeInstance, anyon: str) -> complex:
    """Statistical phase from the ordered three-arm hop sequence.

    Three endpoints are placed counterclockwise around a junction; the three
    hop strings (1->2, then 3->1, then 2->3) swap two excitations and the
    leg phases cancel pairwise, leaving exactly the exchange phase.  The
    composite is a closed string, so its expectation on the code space is
    definite; anything else means a bad path choice and raises.
    """
    lat = _ds_lattice(code)
    if anyon in ("s", "sbar"):
        ox, oy = 1, 1
        # endpoints 1 (west), 2 (north), 3 (east) around the junction o
        hop_12 = ds_string(
            code, anyon, [(ox - 1, oy), (ox, oy), (ox, oy + 1), (ox, oy + 2)]
        )
        hop_31 = ds_string(
            code, anyon, [(ox + 2, oy), (ox + 1, oy), (ox, oy), (ox - 1, oy)]
        )
        hop_23 = ds_string(
            code, anyon, [(ox, oy + 2), (ox, oy + 1), (ox, oy), (ox + 1, oy), (ox + 2, oy)]
        )
        total = w_multiply(hop_23, w_multiply(hop_31, hop_12))
    elif anyon == "ssbar":
        ox, oy = 1, 1
        hop_12 = ds_string(
            code, "ssbar", [(ox + 2, oy), (ox + 1, oy), (ox, oy), (ox, oy + 1), (ox, oy + 2)]
        )
        hop_31 = ds_string(
            code, "ssbar", [(ox - 1, oy), (ox, oy), (ox + 1, oy), (ox + 2, oy)]
        )
        hop_23 = ds_string(
            code, "ssbar", [(ox, oy + 2), (ox, oy + 1), (ox, oy), (ox - 1, oy)]
        )
        total = w_multiply(hop_23, w_multiply(hop_31, hop_12))
    else:
        raise ValueError(f"unknown anyon {anyon!r}")
    e = code.group.expectation(total)
    if e.kind != "definite":
        raise ValueError(f"exchange process is not definite on the code space ({e.kind})")
    return e.value
