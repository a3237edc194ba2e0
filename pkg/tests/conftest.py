from functools import lru_cache

import pytest

from kcube import fixtures
from kcube.complex import build_one_vertex_complex, digraph_from_complex
from kcube.covers import double_cover, cover_from_hom, solve_abelian_quotient
from kcube.kgraph import _UnionFind, paths_of_length

STRUCTURES = ("gamma1", "gamma2", "torus", "vh44")
ACCEPTANCE: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for n in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[n])


@lru_cache(maxsize=None)
def structure(name):
    return fixtures.preset(name)


@lru_cache(maxsize=None)
def base_complex(name):
    return build_one_vertex_complex(structure(name))


@lru_cache(maxsize=None)
def digraph(name):
    """Digraph of a preset, or of a cover: ``"gamma1/double"``, ``"gamma1/abelian"``."""
    if "/" not in name:
        return digraph_from_complex(base_complex(name))
    base, kind = name.split("/")
    if kind == "double":
        return digraph_from_complex(double_cover(base_complex(base)))
    sol = solve_abelian_quotient(structure(base), 5, 2, each_alphabet_generates=True)[0]
    return digraph_from_complex(cover_from_hom(structure(base), sol.assignment))


@lru_cache(maxsize=None)
def divert_classes(name, n):
    """Oracle: congruence classes of length-n words by union-find over single diverts."""
    dg = digraph(name)
    uf = _UnionFind()
    words = paths_of_length(dg, n)
    for w in words:
        uf.find(w)
        for s in range(n - 1):
            if dg.color(w[s]) != dg.color(w[s + 1]):
                uf.union(w, w[:s] + dg.exchange(w[s], w[s + 1]) + w[s + 2:])
    classes = {}
    for w in words:
        classes.setdefault(uf.find(w), []).append(w)
    return list(classes.values())


@pytest.fixture(params=STRUCTURES)
def preset_name(request):
    return request.param
