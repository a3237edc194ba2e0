from math import prod

import numpy as np
import pytest

from kcube import fixtures
from kcube.complex import build_one_vertex_complex, digraph_from_complex, enumerate_cubes
from kcube.validation import InconsistencyError, KCubeError

from conftest import STRUCTURES, base_complex, structure


def cube_count_oracle(s):
    """One vertex, complete tripartite links: each cube shows up at all 8 corners."""
    sizes = s.sizes()
    from itertools import combinations

    return sum(prod(t) for t in combinations(sizes, 3)) // 8


@pytest.mark.parametrize("name", STRUCTURES)
def test_complex_validates(name):
    c = base_complex(name)
    assert c.validate().passed
    assert len(c.vertices) == 1
    assert len(c.geom_edges) == sum(structure(name).sizes()) // 2


@pytest.mark.parametrize("name,count", [("gamma1", 27), ("gamma2", 24), ("torus", 0), ("vh44", 0)])
def test_cube_counts(name, count):
    c = base_complex(name)
    cubes, n = enumerate_cubes(c)
    assert n == count == cube_count_oracle(structure(name))
    for cube in cubes:
        assert len(cube.corners) == 8
        # opposite faces may coincide in a one-vertex complex; their colors pair up
        pairs = [frozenset(c.color(x) for x in f) for f in cube.faces]
        assert pairs[0::2] == pairs[1::2] and len(set(pairs)) == 3


def test_free_product_cubes():
    s = fixtures.free_product(1, 2, 3)
    assert enumerate_cubes(build_one_vertex_complex(s))[1] == 6 == cube_count_oracle(s)


def test_cube_faces_are_squares():
    c = base_complex("gamma2")
    for cube in c.cubes:
        for face in cube.faces:
            assert face in {c.canonical_square(sq) for sq in c.squares}


def test_readings_share_canonical_form():
    c = base_complex("gamma1")
    for sq in list(c.squares)[:10]:
        assert {c.canonical_square(r) for r in c.readings(sq)} == {c.canonical_square(sq)}


def test_corner_completion_matches_structure():
    s = structure("gamma1")
    c = base_complex("gamma1")
    for (x, y), img in s.phi_table().items():
        # structure: x y = y' x'; complex corner (x, y') completes to (y, x')
        yp, xp = img
        assert c.complete(x, yp) == (y, xp)


def test_invalid_structure_not_built():
    s = structure("vh44")
    broken = type(s)(s.k, s.alphabets, s.squares_sorted()[1:])
    with pytest.raises(KCubeError):
        build_one_vertex_complex(broken)
    c = build_one_vertex_complex(broken, check=False)
    assert not c.validate().passed
    with pytest.raises(InconsistencyError):
        digraph_from_complex(c)


def test_adjacency_one_vertex():
    mats = base_complex("gamma2").adjacency_matrices()
    assert [M.tolist() for M in mats] == [[[4]], [[6]], [[8]]]


def test_json_export(tmp_path):
    c = base_complex("gamma2")
    c.dump(tmp_path / "c.json")
    import json

    data = json.loads((tmp_path / "c.json").read_text())
    assert len(data["cubes"]) == 24
    assert len(data["squares"]) == 26
