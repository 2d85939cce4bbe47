"""Cellulation, homology and plane-graph tests."""

import random

import numpy as np
import pytest

from stabgames.complexes import (
    CellComplex,
    ChainComplex,
    build_torus_2d,
    build_torus_3d,
    cycle_graph,
    dipole_graph,
    dualize,
    gf2_rank,
    plane_graph_complex,
    random_stacked_triangulation,
    wheel_graph,
)


def naive_rank(rows, ncols):
    """Dense GF(2) elimination oracle."""
    if not rows:
        return 0
    m = np.array([[(r >> c) & 1 for c in range(ncols)] for r in rows], dtype=np.uint8)
    rank = 0
    row = 0
    for col in range(ncols):
        piv = None
        for r in range(row, len(m)):
            if m[r, col]:
                piv = r
                break
        if piv is None:
            continue
        m[[row, piv]] = m[[piv, row]]
        for r in range(len(m)):
            if r != row and m[r, col]:
                m[r] ^= m[row]
        rank += 1
        row += 1
        if row == len(m):
            break
    return rank


def test_gf2_rank_against_naive():
    rng = random.Random(42)
    for _ in range(200):
        ncols = rng.randrange(1, 12)
        rows = [rng.getrandbits(ncols) for _ in range(rng.randrange(0, 10))]
        assert gf2_rank(rows) == naive_rank(rows, ncols)


class TestTorusBuilders:
    def test_2d_counts(self):
        assert build_torus_2d(2).dims() == (4, 8, 4)
        assert build_torus_2d(3).dims() == (9, 18, 9)

    def test_3d_counts(self):
        assert build_torus_3d(2).dims() == (8, 24, 24, 8)

    def test_boundary_squares_to_zero(self):
        for c in (build_torus_2d(3), build_torus_3d(2)):
            assert c.to_chain().check_boundary_squares_to_zero()

    def test_small_l_rejected(self):
        with pytest.raises(ValueError):
            build_torus_2d(1)


class TestHomology:
    def test_torus_2d(self):
        c = build_torus_2d(3).to_chain()
        assert [c.homology_dim(i) for i in range(3)] == [1, 2, 1]

    def test_torus_3d(self):
        c = build_torus_3d(2).to_chain()
        assert [c.homology_dim(i) for i in range(4)] == [1, 3, 3, 1]

    def test_sphere_complex(self):
        p, _ = plane_graph_complex(random_stacked_triangulation(4, seed=1))
        c = p.to_chain()
        assert [c.homology_dim(i) for i in range(3)] == [1, 0, 1]

    def test_cohomology_matches_homology(self):
        for cell in (build_torus_2d(2), build_torus_3d(2)):
            c = cell.to_chain()
            for i in range(len(c.dims)):
                assert c.cohomology_dim(i) == c.homology_dim(i)


class TestEulerCheck:
    def test_tori_have_zero_characteristic(self):
        assert build_torus_2d(2).to_chain().euler_check()
        assert build_torus_3d(3).to_chain().euler_check()
        assert sum((-1) ** i * d for i, d in enumerate(build_torus_3d(2).dims())) == 0

    def test_sphere_has_characteristic_two(self):
        p, d = plane_graph_complex(wheel_graph(5))
        for c in (p.to_chain(), d.to_chain()):
            assert c.euler_check()
            assert sum((-1) ** i * dd for i, dd in enumerate(c.dims)) == 2


class TestDualize:
    def test_2d_self_duality(self):
        c = build_torus_2d(3)
        d = dualize(c)
        assert d.dims() == c.dims()
        assert d.to_chain().homology_dim(1) == 2

    def test_3d_counts_swap(self):
        c = build_torus_3d(2)
        d = dualize(c)
        assert d.dims() == tuple(reversed(c.dims()))

    def test_double_dual_restores(self):
        c = build_torus_3d(2)
        dd = dualize(dualize(c))
        assert dd.dims() == c.dims()
        for k in range(1, 4):
            assert dd.to_chain().boundary_rank(k) == c.to_chain().boundary_rank(k)

    def test_dual_homology_equals_primal_cohomology(self):
        c = build_torus_3d(2)
        d = dualize(c)
        for i in range(4):
            assert d.to_chain().homology_dim(i) == c.to_chain().cohomology_dim(3 - i)

    def test_open_complex_rejected(self):
        c = build_torus_2d(2)
        open_c = CellComplex(c.dim, c.cells, c.boundary_keys, closed=False)
        with pytest.raises(ValueError):
            dualize(open_c)


class TestPlaneGraphs:
    def test_triangle(self):
        g = cycle_graph(3)
        p, d = plane_graph_complex(g)
        assert p.dims()[2] == 2 and d.dims()[2] == 3
        assert p.dims()[2] + d.dims()[2] - 2 == 3

    def test_wheel_counts(self):
        g = wheel_graph(4)
        assert len(g.edges) == 8
        p, d = plane_graph_complex(g)
        assert p.dims()[2] + d.dims()[2] - 2 == 8
        # self-dual: same degree sequence of faces vs vertices
        assert sorted(len(fs) for fs in g.face_edge_sets()) == sorted(
            len([1 for (u, v) in g.edges if w in (u, v)]) for w in g.vertices
        )

    def test_cycle_dipole_duality(self):
        c, d = cycle_graph(6), dipole_graph(6)
        assert len(c.faces) == 2 and len(d.faces) == 6

    def test_euler_formula_on_random_graphs(self):
        for seed in range(10):
            g = random_stacked_triangulation(2 + seed % 5, seed=seed)
            p, d = plane_graph_complex(g)
            assert p.dims()[2] + d.dims()[2] - 2 == len(g.edges)

    def test_self_loop_rejected(self):
        from stabgames.complexes import PlaneGraph

        with pytest.raises(ValueError):
            PlaneGraph((0,), ((0, 0),), {0: [(0, 0), (0, 1)]})

    def test_bridge_rejected_by_dual(self):
        from stabgames.complexes import PlaneGraph

        # path graph: its single edge is a bridge, dual has a self-loop
        g = PlaneGraph((0, 1), ((0, 1),), {0: [(0, 0)], 1: [(0, 1)]})
        assert not g.dual_is_loopless()
        with pytest.raises(ValueError):
            plane_graph_complex(g)


def test_complex_text_round_trip():
    from stabgames.complexes import complex_from_text, complex_to_text

    c = build_torus_2d(3)
    c2 = complex_from_text(complex_to_text(c))
    assert c2.dims() == c.dims()
    assert c2.to_chain().homology_dim(1) == 2
    assert c2.to_chain().check_boundary_squares_to_zero()


def test_plane_graph_text_round_trip():
    from stabgames.complexes import plane_graph_from_text, plane_graph_to_text

    g = wheel_graph(5)
    g2 = plane_graph_from_text(plane_graph_to_text(g))
    assert g2.edges == g.edges
    assert len(g2.faces) == len(g.faces)
    assert g2.face_edge_sets() == g.face_edge_sets()
