"""The path category of a k-dimensional digraph.

Morphisms are classes of composable edge words under the congruence
generated by diverting ``xy -> phi(xy)``.  Words are read from the origin,
and the rainbow representative lists colors in decreasing order, so the
largest color sits next to the origin.
"""

from __future__ import annotations

from collections import defaultdict, deque
from dataclasses import dataclass, field
from itertools import product
from typing import Hashable, Iterable, Sequence

import numpy as np

from .digraph import ColoredDigraph, check_rigidity, f2_chains, strongly_connected
from .validation import InconsistencyError, KCubeError


@dataclass(frozen=True)
class PathWord:
    dg: ColoredDigraph = field(compare=False, repr=False)
    edges: tuple[str, ...]
    start: Hashable

    def __post_init__(self):
        object.__setattr__(self, "edges", tuple(self.edges))
        dg = self.dg
        for x in self.edges:
            if x not in dg.edges:
                raise KCubeError(f"unknown edge {x}")
        if self.edges and dg.o(self.edges[0]) != self.start:
            raise KCubeError(f"path starts at {self.start} but its first edge leaves {dg.o(self.edges[0])}")
        for x, y in zip(self.edges, self.edges[1:]):
            if dg.t(x) != dg.o(y):
                raise KCubeError(f"edges {x} and {y} are not composable")

    @classmethod
    def of(cls, dg: ColoredDigraph, edges: Sequence[str]) -> PathWord:
        if not edges:
            raise KCubeError("an empty path needs an explicit start vertex")
        return cls(dg, tuple(edges), dg.o(edges[0]))

    @classmethod
    def empty(cls, dg: ColoredDigraph, v) -> PathWord:
        return cls(dg, (), v)

    def __len__(self):
        return len(self.edges)

    @property
    def end(self):
        return self.dg.t(self.edges[-1]) if self.edges else self.start

    @property
    def colors(self) -> tuple[int, ...]:
        return tuple(self.dg.color(x) for x in self.edges)

    @property
    def degree(self) -> tuple[int, ...]:
        d = [0] * self.dg.k
        for c in self.colors:
            d[c - 1] += 1
        return tuple(d)

    def replace(self, edges: Sequence[str]) -> PathWord:
        return PathWord(self.dg, tuple(edges), self.start)

    def __add__(self, other: PathWord) -> PathWord:
        """Concatenation: ``self`` first, then ``other``."""
        if self.end != other.start:
            raise KCubeError("paths are not composable")
        return PathWord(self.dg, self.edges + other.edges, self.start)

    def split(self, n: int) -> tuple[PathWord, PathWord]:
        head = PathWord(self.dg, self.edges[:n], self.start)
        tail = PathWord(self.dg, self.edges[n:], head.end)
        return head, tail


def divert(p: PathWord, s: int) -> PathWord:
    """Replace the edges at positions ``s, s + 1`` (1-based) by their phi image."""
    if not 1 <= s < len(p):
        raise KCubeError(f"position {s} out of range for a path of length {len(p)}")
    x, y = p.edges[s - 1], p.edges[s]
    if p.dg.color(x) == p.dg.color(y):
        raise KCubeError(f"edges {x} and {y} have the same color")
    yp, xp = p.dg.exchange(x, y)
    return p.replace(p.edges[:s - 1] + (yp, xp) + p.edges[s + 1:])


def _sort_by_rank(p: PathWord, rank: list[int]) -> PathWord:
    """Bubble edges into increasing ``rank`` order using diverts.

    A window of three distinct, fully inverted colors is reversed through
    both chains of the cube condition, which must agree.
    """
    edges = list(p.edges)
    rank = list(rank)
    dg = p.dg
    changed = True
    while changed:
        changed = False
        s = 0
        while s < len(edges) - 1:
            if rank[s] <= rank[s + 1]:
                s += 1
                continue
            cs = {dg.color(x) for x in edges[s:s + 3]}
            if s + 2 < len(edges) and rank[s + 1] > rank[s + 2] and len(cs) == 3:
                one, two = f2_chains(dg, *edges[s:s + 3])
                if one != two:
                    raise InconsistencyError(
                        f"tricolored path {tuple(edges[s:s + 3])} reverses to {one} and {two}",
                        tuple(edges[s:s + 3]),
                    )
                edges[s:s + 3] = one
                rank[s:s + 3] = rank[s:s + 3][::-1]
            else:
                edges[s:s + 2] = dg.exchange(edges[s], edges[s + 1])
                rank[s], rank[s + 1] = rank[s + 1], rank[s]
            changed = True
            s = max(s - 1, 0)
    return p.replace(edges)


def normalize(p: PathWord) -> PathWord:
    """Rainbow representative: colors in decreasing blocks from the origin."""
    return _sort_by_rank(p, [-c for c in p.colors])


def rearrange(p: PathWord, colors: Sequence[int]) -> PathWord:
    """The representative of p's class whose color word is ``colors``."""
    if sorted(colors) != sorted(p.colors):
        raise KCubeError(f"color word {tuple(colors)} has a different degree from the path")
    slots = defaultdict(deque)
    for n, c in enumerate(colors):
        slots[c].append(n)
    rank = [slots[c].popleft() for c in p.colors]
    return _sort_by_rank(p, rank)


def factorize(p: PathWord, m: Sequence[int]) -> tuple[PathWord, PathWord]:
    """Split ``p`` as ``C`` followed by ``B`` with ``degree(C) = m``; returns ``(B, C)``."""
    d = p.degree
    m = tuple(int(v) for v in m)
    if len(m) != len(d) or any(a < 0 or a > b for a, b in zip(m, d)):
        raise KCubeError(f"degree {m} is not dominated by {d}")
    rest = tuple(b - a for a, b in zip(m, d))
    word = [c for c in range(len(m), 0, -1) for _ in range(m[c - 1])]
    word += [c for c in range(len(rest), 0, -1) for _ in range(rest[c - 1])]
    q = rearrange(p, word)
    C, B = q.split(sum(m))
    return B, C


# closure oracle

def divert_class(p: PathWord) -> set[tuple[str, ...]]:
    """Every word reachable from ``p`` by diverts, by breadth-first search."""
    dg = p.dg
    seen = {p.edges}
    queue = deque([p.edges])
    while queue:
        w = queue.popleft()
        for s in range(len(w) - 1):
            if dg.color(w[s]) != dg.color(w[s + 1]):
                nw = w[:s] + dg.exchange(w[s], w[s + 1]) + w[s + 2:]
                if nw not in seen:
                    seen.add(nw)
                    queue.append(nw)
    return seen


def paths_of_length(dg: ColoredDigraph, n: int, start=None) -> list[tuple[str, ...]]:
    starts = [start] if start is not None else list(dg.vertices)
    out = []
    for v in starts:
        layer = [((), v)]
        for _ in range(n):
            layer = [(w + (x,), dg.t(x)) for w, u in layer for x in dg.out_edges[u]]
        out.extend(w for w, _ in layer)
    return out


class _UnionFind:
    def __init__(self):
        self.parent = {}

    def find(self, x):
        self.parent.setdefault(x, x)
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, x, y):
        rx, ry = self.find(x), self.find(y)
        if rx != ry:
            self.parent[max(rx, ry)] = min(rx, ry)


@dataclass
class FactorizationReport:
    passed: bool
    classes: int
    checked: int
    witnesses: list = field(default_factory=list)

    def __bool__(self):
        return self.passed


def check_unique_factorization(dg: ColoredDigraph, max_degree_sum: int) -> FactorizationReport:
    """Brute force: for every class of length <= bound and every split m, the
    (prefix class, suffix class) pair must exist and be unique."""
    uf = _UnionFind()
    words_by_len = {}
    for n in range(max_degree_sum + 1):
        if n == 0:
            words = [("@", v) for v in dg.vertices]
        else:
            words = paths_of_length(dg, n)
        words_by_len[n] = words
        for w in words:
            uf.find(w)
            if n < 2:
                continue
            for s in range(n - 1):
                if dg.color(w[s]) != dg.color(w[s + 1]):
                    try:
                        nw = w[:s] + dg.exchange(w[s], w[s + 1]) + w[s + 2:]
                    except KCubeError:
                        continue
                    uf.union(w, nw)

    def cls(word: tuple, v) -> tuple:
        return uf.find(word if word else ("@", v))

    members = defaultdict(list)
    for n in range(1, max_degree_sum + 1):
        for w in words_by_len[n]:
            members[uf.find(w)].append(w)

    bad, checked = [], 0
    for root, ws in members.items():
        w0 = ws[0]
        deg = PathWord.of(dg, w0).degree
        for m in product(*(range(d + 1) for d in deg)):
            checked += 1
            cut = sum(m)
            pairs = set()
            for w in ws:
                head = w[:cut]
                hd = [0] * len(deg)
                for x in head:
                    hd[dg.color(x) - 1] += 1
                if tuple(hd) != m:
                    continue
                mid = dg.t(head[-1]) if head else dg.o(w[0])
                pairs.add((cls(head, dg.o(w[0])), cls(w[cut:], mid)))
            if len(pairs) != 1:
                bad.append({"path": w0, "m": m, "factorizations": len(pairs)})
    return FactorizationReport(not bad, len(members), checked, bad[:10])


# matrices and report

@dataclass
class CoordinateMatrices:
    vertices: tuple
    matrices: list[np.ndarray]

    @property
    def k(self) -> int:
        return len(self.matrices)

    def __getitem__(self, i: int) -> np.ndarray:
        """1-based color index."""
        return self.matrices[i - 1]

    def symmetric(self) -> bool:
        return all((M == M.T).all() for M in self.matrices)

    def commute(self) -> bool:
        return all(
            (A @ B == B @ A).all() for n, A in enumerate(self.matrices) for B in self.matrices[n + 1:]
        )

    def to_text(self) -> str:
        lines = [f"{len(self.vertices)} {self.k}"]
        for M in self.matrices:
            lines.extend(" ".join(str(int(v)) for v in row) for row in M)
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> CoordinateMatrices:
        rows = [line.split() for line in text.splitlines() if line.strip()]
        try:
            N, k = int(rows[0][0]), int(rows[0][1])
            data = np.array([[int(v) for v in r] for r in rows[1:]], dtype=np.int64)
        except (IndexError, ValueError) as exc:
            raise KCubeError(f"malformed matrix block file: {exc}") from exc
        if data.shape != (N * k, N):
            raise KCubeError(f"expected {k} blocks of {N}x{N}, got shape {data.shape}")
        return cls(tuple(range(1, N + 1)), [data[i * N:(i + 1) * N] for i in range(k)])


def coordinate_matrices(dg: ColoredDigraph) -> CoordinateMatrices:
    """``M_i[v, w]`` counts color-i edges from ``w`` to ``v``."""
    idx = dg.vertex_index
    N = len(dg.vertices)
    mats = [np.zeros((N, N), dtype=np.int64) for _ in range(dg.k)]
    for e in dg.edges.values():
        mats[e.color - 1][idx[e.terminus], idx[e.origin]] += 1
    return CoordinateMatrices(dg.vertices, mats)


def structure_report(dg: ColoredDigraph) -> dict:
    rig = check_rigidity(dg)
    conn = strongly_connected(dg)
    aperiodic = rig.left and rig.right
    L = {}
    for c in range(1, dg.k + 1):
        L[c] = min((len(dg.out_by_color(v, c)) / 2 for v in dg.vertices), default=0)
    return {
        "left_rigid": rig.left,
        "right_rigid": rig.right,
        "rigid": aperiodic,
        "strongly_connected": conn,
        "aperiodic": aperiodic,
        "aperiodic_basis": "rigidity",
        "min_L": L,
        "purely_infinite_eligible": aperiodic and conn and all(v >= 2 for v in L.values()),
    }
