"""k-dimensional digraphs: colored multigraphs with an exchange map on 2-paths."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Hashable, Iterator, Mapping, NamedTuple

import numpy as np

from .validation import KCubeError, ValidationReport

Pair = tuple[str, str]


class Edge(NamedTuple):
    origin: Hashable
    terminus: Hashable
    color: int


@dataclass(eq=False)
class ColoredDigraph:
    """Vertices, colored directed edges, and ``phi: (x, y) -> (y', x')``.

    ``phi`` maps a bicolored 2-path ``xy`` to the 2-path ``y'x'`` with the
    same endpoints and the colors in the other order.
    """

    vertices: tuple
    edges: dict[str, Edge]
    phi: dict[Pair, Pair] = field(default_factory=dict)

    def __post_init__(self):
        self.vertices = tuple(self.vertices)
        self.edges = {x: Edge(*e) for x, e in self.edges.items()}
        vs = set(self.vertices)
        for x, e in self.edges.items():
            if e.origin not in vs or e.terminus not in vs:
                raise KCubeError(f"edge {x} has an endpoint outside the vertex set")
        for key, val in self.phi.items():
            for y in (*key, *val):
                if y not in self.edges:
                    raise KCubeError(f"phi entry {key}->{val} mentions unknown edge {y}")

    def __repr__(self):
        return f"ColoredDigraph(vertices={len(self.vertices)}, edges={len(self.edges)}, k={self.k})"

    @property
    def k(self) -> int:
        return max((e.color for e in self.edges.values()), default=0)

    @cached_property
    def order(self) -> dict[str, int]:
        return {x: n for n, x in enumerate(self.edges)}

    @cached_property
    def vertex_index(self) -> dict[Hashable, int]:
        return {v: n for n, v in enumerate(self.vertices)}

    def o(self, x: str):
        return self.edges[x].origin

    def t(self, x: str):
        return self.edges[x].terminus

    def color(self, x: str) -> int:
        return self.edges[x].color

    @cached_property
    def out_edges(self) -> dict[Hashable, list[str]]:
        out = {v: [] for v in self.vertices}
        for x, e in self.edges.items():
            out[e.origin].append(x)
        return out

    def out_by_color(self, v, color: int) -> list[str]:
        return [x for x in self.out_edges[v] if self.edges[x].color == color]

    def two_paths(self) -> Iterator[Pair]:
        """The set Y of bicolored paths of length two."""
        for x, e in self.edges.items():
            for y in self.out_edges[e.terminus]:
                if self.edges[y].color != e.color:
                    yield (x, y)

    def exchange(self, x: str, y: str) -> Pair:
        try:
            return self.phi[x, y]
        except KeyError:
            raise KCubeError(f"phi is undefined on ({x}, {y})") from None

    def mutate_swap(self, p: Pair, q: Pair) -> ColoredDigraph:
        """Copy with the images of ``p`` and ``q`` exchanged (phi stays an involution)."""
        phi = dict(self.phi)
        img_p, img_q = phi[p], phi[q]
        phi[p], phi[q] = img_q, img_p
        phi[img_q], phi[img_p] = p, q
        return ColoredDigraph(self.vertices, dict(self.edges), phi)

    def without(self, p: Pair) -> ColoredDigraph:
        phi = {key: val for key, val in self.phi.items() if key != p}
        return ColoredDigraph(self.vertices, dict(self.edges), phi)

    # serialization

    def to_dict(self) -> dict:
        return {
            "vertices": [_plain(v) for v in self.vertices],
            "edges": [
                {"id": x, "origin": _plain(e.origin), "terminus": _plain(e.terminus), "color": e.color}
                for x, e in self.edges.items()
            ],
            "phi": [[x, y, yp, xp] for (x, y), (yp, xp) in sorted(
                self.phi.items(), key=lambda kv: (self.order[kv[0][0]], self.order[kv[0][1]])
            )],
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> ColoredDigraph:
        try:
            vertices = tuple(data["vertices"])
            edges = {e["id"]: Edge(e["origin"], e["terminus"], int(e["color"])) for e in data["edges"]}
            phi = {}
            for x, y, yp, xp in data["phi"]:
                phi[x, y] = (yp, xp)
        except (KeyError, TypeError, ValueError) as exc:
            raise KCubeError(f"malformed digraph document: {exc}") from exc
        return cls(vertices, edges, phi)

    def dump(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=1) + "\n", encoding="utf-8")


def load_digraph(path: str | Path) -> ColoredDigraph:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise KCubeError(f"{path}: invalid JSON: {exc}") from exc
    return ColoredDigraph.from_dict(data)


def _plain(v):
    if isinstance(v, np.integer):
        return int(v)
    return v if isinstance(v, (int, str)) else str(v)


def validate_f1(dg: ColoredDigraph) -> ValidationReport:
    report = ValidationReport()
    Y = set(dg.two_paths())
    report.add("phi_total", sorted(p for p in Y if p not in dg.phi), "phi is defined on every bicolored 2-path")
    report.add("phi_domain", sorted(p for p in dg.phi if p not in Y), "phi is only defined on bicolored 2-paths")
    bad_shape = []
    bad_inv = []
    for (x, y), (yp, xp) in sorted(dg.phi.items()):
        ok = (
            dg.color(yp) == dg.color(y)
            and dg.color(xp) == dg.color(x)
            and dg.o(yp) == dg.o(x)
            and dg.t(yp) == dg.o(xp)
            and dg.t(xp) == dg.t(y)
        )
        if not ok:
            bad_shape.append(((x, y), (yp, xp)))
        if dg.phi.get((yp, xp)) != (x, y):
            bad_inv.append(((x, y), (yp, xp), dg.phi.get((yp, xp))))
    report.add("colors_and_endpoints", bad_shape, "phi swaps colors and keeps endpoints")
    report.add("involution", bad_inv, "phi composed with itself is the identity")
    return report


def f2_chains(dg: ColoredDigraph, x: str, y: str, z: str) -> tuple[tuple, tuple]:
    """Both ways of reversing the tricolored path ``xyz``; F2 says they agree."""
    phi = dg.exchange
    y1, x1 = phi(x, y)
    z1, x2 = phi(x1, z)
    z2, y2 = phi(y1, z1)
    z_1, y_1 = phi(y, z)
    z_2, x_1 = phi(x, z_1)
    y_2, x_2 = phi(x_1, y_1)
    return (z2, y2, x2), (z_2, y_2, x_2)


def tricolored_paths(dg: ColoredDigraph) -> Iterator[tuple[str, str, str]]:
    for x, e in dg.edges.items():
        for y in dg.out_edges[e.terminus]:
            cy = dg.color(y)
            if cy == e.color:
                continue
            for z in dg.out_edges[dg.t(y)]:
                if dg.color(z) not in (e.color, cy):
                    yield (x, y, z)


def validate_f2(dg: ColoredDigraph) -> ValidationReport:
    report = ValidationReport()
    bad = []
    for x, y, z in tricolored_paths(dg):
        try:
            one, two = f2_chains(dg, x, y, z)
        except KCubeError as exc:
            bad.append(((x, y, z), str(exc)))
            continue
        if one != two:
            bad.append(((x, y, z), one, two))
    report.add("f2", bad, "both reversals of every tricolored path agree")
    return report


@dataclass
class Rigidity:
    left: bool
    right: bool
    witnesses: dict = field(default_factory=dict)

    def __bool__(self):
        return self.left and self.right


def check_rigidity(dg: ColoredDigraph) -> Rigidity:
    """Right: each outgoing corner (x, y) has one completion x y' ~ y x'.
    Left: each incoming corner (x', y') has one completion."""
    right: dict[Pair, int] = {}
    left: dict[Pair, int] = {}
    for (x, yp), (y, xp) in dg.phi.items():
        right[x, y] = right.get((x, y), 0) + 1
        left[xp, yp] = left.get((xp, yp), 0) + 1
    bad_right, bad_left = [], []
    for v in dg.vertices:
        for x in dg.out_edges[v]:
            for y in dg.out_edges[v]:
                if dg.color(x) != dg.color(y) and right.get((x, y), 0) != 1:
                    bad_right.append(((x, y), right.get((x, y), 0)))
    incoming = {v: [] for v in dg.vertices}
    for x, e in dg.edges.items():
        incoming[e.terminus].append(x)
    for v in dg.vertices:
        for xp in incoming[v]:
            for yp in incoming[v]:
                if dg.color(xp) != dg.color(yp) and left.get((xp, yp), 0) != 1:
                    bad_left.append(((xp, yp), left.get((xp, yp), 0)))
    return Rigidity(not bad_left, not bad_right, {"left": bad_left[:10], "right": bad_right[:10]})


def _reach(start, step) -> set:
    seen = {start}
    stack = [start]
    while stack:
        v = stack.pop()
        for w in step(v):
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return seen


def strongly_connected(dg: ColoredDigraph) -> bool:
    if len(dg.vertices) <= 1:
        return True
    succ = {v: set() for v in dg.vertices}
    pred = {v: set() for v in dg.vertices}
    for e in dg.edges.values():
        succ[e.origin].add(e.terminus)
        pred[e.terminus].add(e.origin)
    v0 = dg.vertices[0]
    n = len(dg.vertices)
    return len(_reach(v0, succ.__getitem__)) == n and len(_reach(v0, pred.__getitem__)) == n
