import math

import pytest

import conefact as cf


def test_symmat_ops():
    inf, frob, spectral = cf.norms([[-1.0, 0.0], [0.0, 2.0]])
    assert inf == pytest.approx(2.0)
    assert frob == pytest.approx(math.sqrt(5.0))
    assert spectral == pytest.approx(2.0)
    assert cf.inner([[1.0, 0.0], [0.0, 1.0]], [[1.0, 0.0], [0.0, 1.0]]) == pytest.approx(2.0)

    v = cf.svec([[1.0, 0.0], [0.0, 1.0]])
    assert v == pytest.approx([1.0, 1.0, 0.0])
    back = cf.smat(v)
    assert back[0][0] == pytest.approx(1.0)
    assert back[0][1] == pytest.approx(0.0)


def test_project_psd_and_witness():
    p = cf.project_psd([[1.0, 0.0], [0.0, -1.0]])
    assert p[0][0] == pytest.approx(1.0)
    assert p[1][1] == pytest.approx(0.0, abs=1e-12)

    delta, witness = cf.psd_distance_witness([[-1.0, 0.0], [0.0, 2.0]])
    assert delta == pytest.approx(1.0)
    assert witness[0][0] == pytest.approx(1.0)

    delta_psd, witness_psd = cf.psd_distance_witness([[1.0, 0.0], [0.0, 2.0]])
    assert delta_psd <= 1e-10
    assert witness_psd is None


def test_polyhedron_ops():
    box = cf.HPolyhedron.box([0.0, 0.0], [1.0, 1.0])
    assert box.contains([0.5, 0.5])
    assert not box.contains([1.5, 0.0])

    line = cf.fourier_motzkin(box, 1)
    assert line.contains([0.5])
    assert not line.contains([1.1])

    tight, dim = cf.minimal_face(box, [0.5, 0.0])
    assert dim == 1
    assert len(tight) == 1


def test_covering_and_cone():
    points, gap = cf.build_covering(2, 0.5, seed=7, samples=1000)
    assert gap < 0.5
    assert len(points) >= 3

    cone = cf.build_cone_approx(2, 0.5, seed=7, samples=1000)
    ident = cf.svec([[1.0, 0.0], [0.0, 1.0]])
    assert cone.contains(ident)


def test_enumerate_partitions():
    parts = cf.enumerate_partitions([[1.0], [2.0], [3.0]], k1=2, k2=1)
    canon = {tuple(tuple(p) for p in sorted(pp)) for pp in parts}
    assert ((0, 1, 2),) in canon
    assert ((0,), (1, 2)) in canon
    assert ((0, 1), (2,)) in canon
    assert len(canon) == 3


def test_factor_in_polyhedron_rank1():
    box = cf.HPolyhedron.box([0.0], [3.0])
    result = cf.factor_in_polyhedron([[1.0, 2.0], [2.0, 4.0]], box, d=1, seed=5)
    assert result is not None
    u, v, residual, violation = result
    assert residual < 1e-6
    assert violation <= 1e-8


def test_factor_in_polyhedron_rank_obstruction():
    box = cf.HPolyhedron.box([0.0], [2.0])
    assert cf.factor_in_polyhedron([[1.0, 0.0], [0.0, 1.0]], box, d=1, seed=5) is None


def test_factor_psd_rank1():
    result = cf.factor_psd([[1.0, 3.0], [2.0, 6.0]], r=1, epsilon=0.1, seed=7, samples=1000)
    assert result is not None
    assert result["achieved_error"] < 0.1
    for u in result["U_rows"]:
        assert u[0][0] >= -1e-12


def test_gen_fixture_identity():
    m, planted_u, planted_v, ratio = cf.gen_fixture(2, 3, 3, seed=4)
    for i in range(3):
        for j in range(3):
            expected = sum(
                planted_u[i][a][b] * planted_v[j][a][b] for a in range(2) for b in range(2)
            )
            assert m[i][j] == pytest.approx(expected)
    assert ratio > 0.0
