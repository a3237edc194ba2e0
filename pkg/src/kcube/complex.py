"""Cube complexes covered by products of trees.

Directed edges come in inverse pairs over geometric edges.  A square is a
closed 4-cycle of directed edges ``(c1, c2, c3, c4)`` alternating two colors;
reading it from the corner ``o(c1)`` says that the paths ``c1 c2`` and
``c4^-1 c3^-1`` are equal.  Each square is stored once, as the least of its
readings that start with the lower color.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations
from pathlib import Path
from typing import Hashable, Iterable

import numpy as np

from .structures import KCubeStructure, validate_structure
from .validation import InconsistencyError, KCubeError, ValidationReport

Square = tuple[str, str, str, str]


@dataclass(frozen=True)
class DirectedEdge:
    id: str
    origin: Hashable
    terminus: Hashable
    color: int
    geom: str
    sign: int = 1


@dataclass(frozen=True)
class GeomEdge:
    id: str
    endpoints: tuple
    color: int
    label: str


@dataclass(frozen=True)
class Cube:
    colors: tuple[int, int, int]
    corners: frozenset  # outgoing (i, j, l) edge triples, one per vertex of the cube
    faces: tuple[Square, ...]  # front/back (ij), left/right (il), bottom/top (jl)


@dataclass(eq=False)
class CubeComplex:
    vertices: tuple
    edges: dict[str, DirectedEdge]
    inverse: dict[str, str]
    squares: frozenset[Square] = frozenset()
    # for covers: vertex and edge maps down to the base complex
    projection: dict | None = None
    edge_projection: dict[str, str] | None = None
    base: CubeComplex | None = field(default=None, repr=False)

    def __post_init__(self):
        self.vertices = tuple(self.vertices)
        for x, e in self.edges.items():
            y = self.inverse.get(x)
            if y is None or y not in self.edges:
                raise KCubeError(f"edge {x} has no inverse")
            f = self.edges[y]
            if self.inverse[y] != x or (f.origin, f.terminus, f.color) != (e.terminus, e.origin, e.color):
                raise KCubeError(f"edges {x} and {y} are not reverses of each other")
            if y == x:
                raise KCubeError(f"edge {x} is its own inverse")
        self.squares = frozenset(self.canonical_square(sq) for sq in self.squares)

    def __repr__(self):
        return (
            f"CubeComplex(vertices={len(self.vertices)}, geom_edges={len(self.geom_edges)}, "
            f"squares={len(self.squares)})"
        )

    @cached_property
    def order(self) -> dict[str, int]:
        return {x: n for n, x in enumerate(self.edges)}

    @property
    def k(self) -> int:
        return max((e.color for e in self.edges.values()), default=0)

    @property
    def colors(self) -> list[int]:
        return sorted({e.color for e in self.edges.values()})

    @cached_property
    def geom_edges(self) -> list[GeomEdge]:
        out = {}
        for x, e in self.edges.items():
            if e.geom not in out:
                out[e.geom] = GeomEdge(e.geom, (e.origin, e.terminus), e.color, e.geom)
        return list(out.values())

    def color(self, x: str) -> int:
        return self.edges[x].color

    def inv(self, x: str) -> str:
        return self.inverse[x]

    @cached_property
    def outgoing(self) -> dict[Hashable, dict[int, list[str]]]:
        out = {v: {c: [] for c in self.colors} for v in self.vertices}
        for x, e in self.edges.items():
            out[e.origin][e.color].append(x)
        return out

    # squares

    def readings(self, sq: Square) -> list[Square]:
        """All eight ways to read a square boundary (4 rotations, 2 directions)."""
        c = list(sq)
        rev = [self.inv(x) for x in reversed(c)]
        out = []
        for seq in (c, rev):
            for r in range(4):
                out.append(tuple(seq[r:] + seq[:r]))
        return out

    def canonical_square(self, sq) -> Square:
        sq = tuple(sq)
        lo = min(self.color(x) for x in sq)
        return min(
            (r for r in self.readings(sq) if self.color(r[0]) == lo),
            key=lambda r: [self.order[x] for x in r],
        )

    def square_problems(self) -> list:
        bad = []
        for sq in sorted(self.squares):
            e = [self.edges[x] for x in sq]
            if any(e[n].terminus != e[(n + 1) % 4].origin for n in range(4)):
                bad.append(("not closed", sq))
            if not (e[0].color == e[2].color != e[1].color == e[3].color):
                bad.append(("colors do not alternate", sq))
        return bad

    @cached_property
    def corners(self) -> dict[tuple[str, str], list[tuple[str, str]]]:
        """Outgoing corner ``(X, Y)`` -> completions ``(Y2, X2)`` with ``X Y2 = Y X2``."""
        table: dict[tuple[str, str], list] = {}
        for sq in sorted(self.squares):
            for c1, c2, c3, c4 in self.readings(sq):
                table.setdefault((c1, self.inv(c4)), []).append((c2, self.inv(c3)))
        return table

    def complete(self, x: str, y: str) -> tuple[str, str]:
        found = self.corners.get((x, y), [])
        if len(found) != 1:
            raise InconsistencyError(f"corner ({x}, {y}) lies in {len(found)} squares", (x, y))
        return found[0]

    def face(self, x: str, y: str) -> Square:
        y2, x2 = self.complete(x, y)
        return self.canonical_square((x, y2, self.inv(x2), self.inv(y)))

    def validate(self) -> ValidationReport:
        report = ValidationReport()
        report.add("squares_closed", self.square_problems())
        bad = []
        for v in self.vertices:
            out = self.outgoing[v]
            for i, j in combinations(self.colors, 2):
                for x in out[i]:
                    for y in out[j]:
                        n = len(self.corners.get((x, y), []))
                        if n != 1:
                            bad.append((v, x, y, n))
        report.add("link_complete_bipartite", bad, "every bicolored corner lies in exactly one square")
        return report

    # cubes

    @cached_property
    def cubes(self) -> list[Cube]:
        return enumerate_cubes(self)[0]

    def cube_at(self, a: str, b: str, c: str) -> Cube:
        """Complete the 3-cube spanned by outgoing edges of three distinct colors."""
        inv = self.inv
        b10, a10 = self.complete(a, b)
        c10, a01 = self.complete(a, c)
        c01, b01 = self.complete(b, c)
        b11, a11 = self.complete(a01, b01)
        c11, a11_ = self.complete(a10, c01)
        c11_, b11_ = self.complete(b10, c10)
        if (a11, b11, c11) != (a11_, b11_, c11_):
            raise InconsistencyError(
                f"cube completion from corner ({a}, {b}, {c}) is inconsistent: "
                f"{(a11, b11, c11)} vs {(a11_, b11_, c11_)}",
                (a, b, c),
            )
        A = {(0, 0): a, (1, 0): a10, (0, 1): a01, (1, 1): a11}
        B = {(0, 0): b, (1, 0): b10, (0, 1): b01, (1, 1): b11}
        C = {(0, 0): c, (1, 0): c10, (0, 1): c01, (1, 1): c11}
        corners = set()
        for e1 in (0, 1):
            for e2 in (0, 1):
                for e3 in (0, 1):
                    x = A[e2, e3] if e1 == 0 else inv(A[e2, e3])
                    y = B[e1, e3] if e2 == 0 else inv(B[e1, e3])
                    z = C[e1, e2] if e3 == 0 else inv(C[e1, e2])
                    corners.add((x, y, z))
        faces = (
            self.canonical_square((a, b10, inv(a10), inv(b))),
            self.canonical_square((a01, b11, inv(a11), inv(b01))),
            self.canonical_square((a, c10, inv(a01), inv(c))),
            self.canonical_square((a10, c11, inv(a11), inv(c01))),
            self.canonical_square((b, c01, inv(b01), inv(c))),
            self.canonical_square((b10, c11, inv(b11), inv(c10))),
        )
        colors = (self.color(a), self.color(b), self.color(c))
        return Cube(colors, frozenset(corners), faces)

    # matrices and export

    def adjacency_matrices(self) -> list[np.ndarray]:
        """Per color, entry (v, w) counts color-i edges from w to v."""
        index = {v: n for n, v in enumerate(self.vertices)}
        mats = []
        for c in range(1, self.k + 1):
            M = np.zeros((len(self.vertices), len(self.vertices)), dtype=np.int64)
            for e in self.edges.values():
                if e.color == c:
                    M[index[e.terminus], index[e.origin]] += 1
            mats.append(M)
        return mats

    def is_connected(self) -> bool:
        if not self.vertices:
            return True
        seen = {self.vertices[0]}
        stack = [self.vertices[0]]
        while stack:
            v = stack.pop()
            for xs in self.outgoing[v].values():
                for x in xs:
                    w = self.edges[x].terminus
                    if w not in seen:
                        seen.add(w)
                        stack.append(w)
        return len(seen) == len(self.vertices)

    def to_dict(self, with_cubes: bool = True) -> dict:
        square_ids = {sq: f"s{n}" for n, sq in enumerate(sorted(self.squares, key=self._square_key))}
        out = {
            "vertices": [_plain(v) for v in self.vertices],
            "geom_edges": [
                {"id": g.id, "endpoints": [_plain(v) for v in g.endpoints], "color": g.color, "label": g.label}
                for g in sorted(self.geom_edges, key=lambda g: (g.color, self.order[g.id]))
            ],
            "edges": [
                {"id": e.id, "origin": _plain(e.origin), "terminus": _plain(e.terminus), "color": e.color,
                 "geom": e.geom, "sign": e.sign}
                for e in self.edges.values()
            ],
            "squares": [{"id": sid, "edges": list(sq)} for sq, sid in square_ids.items()],
        }
        if with_cubes:
            cubes = sorted(self.cubes, key=lambda cb: sorted(square_ids[f] for f in cb.faces))
            out["cubes"] = [[square_ids[f] for f in cb.faces] for cb in cubes]
        return out

    def _square_key(self, sq: Square):
        return [self.order[x] for x in sq]

    def dump(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=1) + "\n", encoding="utf-8")


def _plain(v):
    return v if isinstance(v, (int, str)) else str(v)


def build_one_vertex_complex(s: KCubeStructure, check: bool = True) -> CubeComplex:
    if check:
        report = validate_structure(s)
        if not report.passed:
            failed = ", ".join(c.name for c in report.failures())
            raise KCubeError(f"structure fails validation: {failed}")
    edges = {}
    inverse = {}
    for al in s.alphabets:
        for x in al.letters:
            y = al.inverse[x]
            rep = min(x, y, key=s.key)
            edges[x] = DirectedEdge(x, "*", "*", al.color, rep, 1 if rep == x else -1)
            inverse[x] = y
    squares = [(a, b, s.inv(ap), s.inv(bp)) for a, b, bp, ap in s.squares_sorted()]
    return CubeComplex(("*",), edges, inverse, frozenset(squares))


def enumerate_cubes(c: CubeComplex) -> tuple[list[Cube], int]:
    """Every 3-cube, found by completing each tricolored corner; deduplicated."""
    found: dict[frozenset, Cube] = {}
    for i, j, l in combinations(c.colors, 3):
        for v in c.vertices:
            out = c.outgoing[v]
            for a in out[i]:
                for b in out[j]:
                    for z in out[l]:
                        # no shortcut over already-seen corners: every corner
                        # must complete consistently, not just one per cube
                        cube = c.cube_at(a, b, z)
                        if (a, b, z) not in cube.corners:
                            raise InconsistencyError(f"corner {(a, b, z)} missing from its own cube", (a, b, z))
                        found.setdefault(cube.corners, cube)
    cubes = list(found.values())
    return cubes, len(cubes)


def digraph_from_complex(c: CubeComplex):
    """Two directed edges per geometric edge; phi read off each square."""
    from .digraph import ColoredDigraph

    phi: dict[tuple[str, str], tuple[str, str]] = {}
    clashes = []
    for sq in sorted(c.squares):
        for c1, c2, c3, c4 in c.readings(sq):
            image = (c.inv(c4), c.inv(c3))
            old = phi.setdefault((c1, c2), image)
            if old != image:
                clashes.append(((c1, c2), old, image))
    if clashes:
        raise InconsistencyError(f"2-paths lying in two squares: {clashes[:3]}", clashes)
    missing = []
    for x, e in c.edges.items():
        for col, ys in c.outgoing[e.terminus].items():
            if col == e.color:
                continue
            missing.extend((x, y) for y in ys if (x, y) not in phi)
    if missing:
        raise InconsistencyError(f"2-paths lying in no square: {missing[:3]}", missing)
    return ColoredDigraph(
        c.vertices,
        {x: (e.origin, e.terminus, e.color) for x, e in c.edges.items()},
        phi,
    )
