import math
from fractions import Fraction
from functools import reduce
from itertools import combinations

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from kcube import fixtures
from kcube.complex import build_one_vertex_complex, digraph_from_complex
from kcube.covers import double_cover
from kcube.digraph import ColoredDigraph
from kcube.kgraph import coordinate_matrices
from kcube.spectra import (
    PeriodLattice,
    factor_type_lambda,
    find_isomorphism,
    hermite_normal_form,
    jacobi_eigenvalues,
    period_lattice,
    power_entries,
    ramanujan_check,
    regularity,
    spectral_radius_vector,
    symmetric_eigenvalues,
)
from kcube.validation import KCubeError

from conftest import digraph

M25 = fixtures.preset("matrix25")


def symmetric_matrices(max_n=12):
    return st.integers(1, max_n).flatmap(
        lambda n: st.lists(st.integers(-5, 5), min_size=n * n, max_size=n * n).map(
            lambda v: (lambda A: A + A.T)(np.array(v, dtype=float).reshape(n, n))
        )
    )


@settings(max_examples=50, deadline=None)
@given(symmetric_matrices())
def test_jacobi_matches_lapack(M):
    ours = jacobi_eigenvalues(M)
    ref = np.sort(np.linalg.eigvalsh(M))[::-1]
    assert np.allclose(ours, ref, atol=1e-9)
    assert abs(ours.sum() - np.trace(M)) <= 1e-6 * len(M)


@settings(max_examples=25, deadline=None)
@given(st.randoms(use_true_random=False))
def test_relabeling_invariance(rnd):
    perm = list(range(25))
    rnd.shuffle(perm)
    P = np.eye(25)[perm]
    assert np.allclose(symmetric_eigenvalues(P.T @ M25 @ P), symmetric_eigenvalues(M25), atol=1e-9)


def test_large_matrix_falls_back():
    rng = np.random.default_rng(0)
    A = rng.integers(-3, 4, size=(130, 130)).astype(float)
    A = A + A.T
    ev = symmetric_eigenvalues(A)
    assert np.allclose(ev, np.sort(np.linalg.eigvalsh(A))[::-1], atol=1e-8)
    assert np.allclose(symmetric_eigenvalues(A[:120, :120], method="jacobi"),
                       np.sort(np.linalg.eigvalsh(A[:120, :120]))[::-1], atol=1e-8)


def test_non_symmetric_rejected():
    with pytest.raises(KCubeError):
        symmetric_eigenvalues(np.array([[0, 1], [2, 0]]))


def test_matrix25():
    assert M25.shape == (25, 25) and (M25 == M25.T).all()
    assert regularity(M25) == 6
    ev = symmetric_eigenvalues(M25)
    assert abs(ev[0] - 6) < 1e-9
    rep = ramanujan_check(M25, "kgraph")
    assert rep.ramanujan
    assert rep.lambda2 <= 3.24 + 1e-6 and rep.lambda2 < 2 * math.sqrt(5)
    assert abs(rep.lambda2 - (1 + math.sqrt(5))) < 1e-9
    assert ramanujan_check(M25, "cubical").ramanujan
    diag, off = power_entries(M25, 3)
    assert diag == {12} and off <= {6, 7, 15}


def test_ramanujan_trivial_cases():
    assert ramanujan_check(np.array([[0, 6], [6, 0]]), "cubical").ramanujan
    rep = ramanujan_check(np.array([[6]]), "kgraph")
    assert rep.ramanujan and rep.lambda2 is None
    with pytest.raises(KCubeError):
        ramanujan_check(np.array([[1, 0], [0, 2]]), "kgraph")
    with pytest.raises(KCubeError):
        ramanujan_check(np.array([[6]]), "other")


def test_modes_differ_on_bipartite_graphs():
    # 4-cycle: spectrum {2, 0, 0, -2}; K_{3,3} minus a perfect matching: {2, 1, 1, -1, -1, -2}
    C4 = np.array([[0, 1, 0, 1], [1, 0, 1, 0], [0, 1, 0, 1], [1, 0, 1, 0]])
    assert ramanujan_check(C4, "cubical").ramanujan
    assert ramanujan_check(C4, "kgraph").lambda2 is None
    # cube graph Q3, 3-regular with spectrum {3, 1, 1, 1, -1, -1, -1, -3}
    Q3 = np.array([[int(bin(i ^ j).count("1") == 1) for j in range(8)] for i in range(8)])
    rep = ramanujan_check(Q3, "cubical")
    assert rep.trivial == [3.0, -3.0] or np.allclose(rep.trivial, [3, -3])
    assert rep.ramanujan


def test_connected_regular_top_eigenvalue():
    for name in ("gamma1/double", "gamma1/abelian", "vh44/double"):
        for M in coordinate_matrices(digraph(name)).matrices:
            assert abs(symmetric_eigenvalues(M)[0] - regularity(M)) < 1e-9


def test_spectral_radius_vector():
    assert spectral_radius_vector(coordinate_matrices(digraph("gamma2")).matrices) == (4.0, 6.0, 8.0)


def test_isomorphism():
    rng = np.random.default_rng(3)
    perm = rng.permutation(25)
    B = M25[np.ix_(perm, perm)]
    f = find_isomorphism(M25, B)
    assert f is not None
    assert find_isomorphism(M25, np.eye(25, dtype=int)) is None


def minors_gcd(rows):
    """Oracle: for a full-rank 2D lattice the index is the gcd of 2x2 minors."""
    return reduce(math.gcd, (abs(a[0] * b[1] - a[1] * b[0]) for a, b in combinations(rows, 2)), 0)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.tuples(st.integers(-6, 6), st.integers(-6, 6)), min_size=1, max_size=5))
def test_hnf(rows):
    H = hermite_normal_form(rows)
    lat = PeriodLattice(2, H, 0)
    assert all(lat.contains(r) for r in rows)
    for n, row in enumerate(H):
        piv = next(i for i, v in enumerate(row) if v)
        assert row[piv] > 0
        for above in H[:n]:
            assert 0 <= above[piv] < row[piv]
    if len(H) == 2:
        assert H[0][0] * H[1][1] == minors_gcd(rows)


def family(L):
    return digraph_from_complex(double_cover(build_one_vertex_complex(fixtures.free_product(*L))))


@pytest.mark.parametrize("L", [(1, 1), (2, 2), (1, 2, 3), (2, 2, 2)])
def test_family_lattice(L):
    dg = family(L)
    lat = period_lattice(dg, 4)
    k = len(L)
    for i in range(k):
        e = [0] * k
        e[i] = 2
        assert lat.contains(e)
        e[i] = 1
        assert not lat.contains(e)
        for j in range(i + 1, k):
            f = [0] * k
            f[i] = f[j] = 1
            assert lat.contains(f)
    assert lat.lower_bound and lat.bound == 4


@pytest.mark.parametrize("L", range(1, 11))
def test_factor_type_equal_valencies(L):
    dg = family((L, L))
    lat = period_lattice(dg, 4)
    ft = factor_type_lambda(spectral_radius_vector(coordinate_matrices(dg).matrices), lat)
    assert ft.exact == Fraction(1, (2 * L) ** 2)
    assert abs(ft.lam - (2 * L) ** -2) < 1e-12


def test_factor_type_special_cases():
    zero = PeriodLattice(2, [], 4)
    assert factor_type_lambda((2.0, 3.0), zero).lam == 1.0
    lat = period_lattice(family((1, 2, 3)), 4)
    ft = factor_type_lambda((2.0, 4.0, 6.0), lat)
    assert ft.dense and ft.lam == 1.0
    # generators give 2 log 2, log 2 + log 4 and 2 log 4, whose gcd is log 2
    lat2 = period_lattice(family((1, 2)), 4)
    ft = factor_type_lambda((2.0, 4.0), lat2)
    assert not ft.dense and abs(ft.lam - 1 / 2) < 1e-12
    with pytest.raises(KCubeError):
        factor_type_lambda((1.0, 2.0), lat2)


def test_period_lattice_needs_connectivity():
    dg = ColoredDigraph((1, 2), {"x": (1, 1, 1), "y": (2, 2, 1)}, {})
    with pytest.raises(KCubeError):
        period_lattice(dg)
    acyclic_short = ColoredDigraph((1, 2), {"x": (1, 2, 1), "y": (2, 1, 1)}, {})
    assert period_lattice(acyclic_short, 1).basis == []
