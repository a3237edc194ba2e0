import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from kcube.kgraph import (
    CoordinateMatrices,
    PathWord,
    check_unique_factorization,
    coordinate_matrices,
    divert,
    divert_class,
    factorize,
    normalize,
    paths_of_length,
    rearrange,
    structure_report,
)
from kcube.validation import InconsistencyError, KCubeError

from conftest import digraph, divert_classes

ORACLE_SETS = ("gamma1", "vh44", "torus")


def is_rainbow(colors):
    return list(colors) == sorted(colors, reverse=True)


@pytest.mark.parametrize("name", ORACLE_SETS)
@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_normalize_matches_closure(name, n):
    dg = digraph(name)
    for cls in divert_classes(name, n):
        forms = {normalize(PathWord.of(dg, w)).edges for w in cls}
        assert len(forms) == 1
        (form,) = forms
        assert form in cls
        assert is_rainbow(PathWord.of(dg, form).colors)
        # the rainbow word of a class is unique
        assert sum(is_rainbow([dg.color(x) for x in w]) for w in cls) == 1


def test_divert_class_bfs_agrees():
    dg = digraph("gamma1")
    w = paths_of_length(dg, 3)[123]
    cls = divert_class(PathWord.of(dg, w))
    assert normalize(PathWord.of(dg, w)).edges in cls
    assert all(normalize(PathWord.of(dg, u)).edges == normalize(PathWord.of(dg, w)).edges for u in cls)


@settings(max_examples=60, deadline=None)
@given(st.data())
def test_divert_and_normalize_properties(data):
    name = data.draw(st.sampled_from(["gamma1", "gamma2", "vh44", "gamma1/double"]))
    dg = digraph(name)
    n = data.draw(st.integers(2, 6))
    v = data.draw(st.sampled_from(dg.vertices))
    edges = []
    for _ in range(n):
        edges.append(data.draw(st.sampled_from(dg.out_edges[dg.t(edges[-1]) if edges else v])))
    p = PathWord.of(dg, edges)
    q = normalize(p)
    assert normalize(q) == q
    assert q.degree == p.degree and q.start == p.start and q.end == p.end
    spots = [s for s in range(1, n) if dg.color(edges[s - 1]) != dg.color(edges[s])]
    if spots:
        s = data.draw(st.sampled_from(spots))
        d = divert(p, s)
        assert d.degree == p.degree and d.end == p.end
        assert divert(d, s) == p
        assert normalize(d) == q


def test_divert_examples():
    torus = digraph("torus")
    assert divert(PathWord.of(torus, ["a1", "b1"]), 1).edges == ("b1", "a1")
    assert normalize(PathWord.of(torus, ["a1", "b1"])).edges == ("b1", "a1")
    vh44 = digraph("vh44")
    assert divert(PathWord.of(vh44, ["a1", "b1"]), 1).edges == ("b4", "a3")
    assert normalize(PathWord.of(vh44, ["a1", "a1"])).edges == ("a1", "a1")


def test_divert_errors():
    dg = digraph("vh44")
    p = PathWord.of(dg, ["a1", "a1"])
    with pytest.raises(KCubeError):
        divert(p, 1)
    q = PathWord.of(dg, ["a1", "b1"])
    for s in (0, 2):
        with pytest.raises(KCubeError):
            divert(q, s)


def test_rearrange_and_factorize():
    dg = digraph("gamma2")
    p = PathWord.of(dg, ["a1", "b1", "c1", "a2"])
    q = rearrange(p, [1, 2, 3, 1])
    assert q.colors == (1, 2, 3, 1)
    assert normalize(q) == normalize(p)
    B, C = factorize(p, (1, 0, 1))
    assert C.degree == (1, 0, 1) and B.degree == (1, 1, 0)
    assert C.end == B.start
    assert normalize(C + B) == normalize(p)
    with pytest.raises(KCubeError):
        factorize(p, (0, 2, 0))


def test_factorization_on_cover():
    dg = digraph("gamma1/double")
    p = PathWord.of(dg, paths_of_length(dg, 3, start=1)[40])
    B, C = factorize(p, (0, 0, 0))
    assert C.edges == () and C.start == p.start
    assert normalize(B) == normalize(p)


@pytest.mark.parametrize("name,bound", [("gamma1", 3), ("vh44", 4), ("torus", 4), ("gamma2", 3)])
def test_unique_factorization(name, bound):
    report = check_unique_factorization(digraph(name), bound)
    assert report.passed, report.witnesses


def test_mutant_breaks_factorization():
    mutant = digraph("gamma1").mutate_swap(("a1", "b2"), ("a1", "b6"))
    assert not check_unique_factorization(mutant, 3).passed
    with pytest.raises(InconsistencyError):
        for w in paths_of_length(mutant, 3):
            normalize(PathWord(mutant, w, "*"))


def test_coordinate_matrices_one_vertex():
    cm = coordinate_matrices(digraph("gamma1"))
    assert [M.tolist() for M in cm.matrices] == [[[6]], [[6]], [[6]]]
    assert cm[2].tolist() == [[6]]


@pytest.mark.parametrize("name", ["gamma1", "gamma2", "vh44", "torus", "gamma1/double", "vh44/double", "gamma1/abelian"])
def test_coordinate_matrices_commute(name):
    cm = coordinate_matrices(digraph(name))
    assert cm.symmetric() and cm.commute()
    again = CoordinateMatrices.from_text(cm.to_text())
    assert all((A == B).all() for A, B in zip(again.matrices, cm.matrices))


def test_block_text_errors():
    with pytest.raises(KCubeError):
        CoordinateMatrices.from_text("2 1\n0 1\n")


def test_structure_report():
    rep = structure_report(digraph("gamma1/abelian"))
    assert rep["rigid"] and rep["strongly_connected"] and rep["purely_infinite_eligible"]
    assert rep["min_L"] == {1: 3.0, 2: 3.0, 3: 3.0}
    assert not structure_report(digraph("torus"))["purely_infinite_eligible"]
