"""Finite covers of one-vertex complexes.

Sheets are numbered 1..N.  Permutations are stored 0-based internally as
tuples ``p`` with ``p[n]`` the image of sheet ``n + 1`` minus one, and are
composed right to left: ``(f * g)(n) = f(g(n))``.
"""

from __future__ import annotations

import itertools
import json
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .complex import CubeComplex, DirectedEdge, build_one_vertex_complex
from .structures import KCubeStructure
from .validation import KCubeError

Perm = tuple[int, ...]


def compose(f: Perm, g: Perm) -> Perm:
    """Right-to-left composition: apply ``g`` first."""
    return tuple(f[n] for n in g)


def invert(f: Perm) -> Perm:
    out = [0] * len(f)
    for n, m in enumerate(f):
        out[m] = n
    return tuple(out)


def identity(N: int) -> Perm:
    return tuple(range(N))


def perm_order(f: Perm) -> int:
    g, n = f, 1
    while g != identity(len(f)):
        g, n = compose(f, g), n + 1
    return n


def from_cycles(cycles: Sequence[Sequence[int]], N: int) -> Perm:
    """1-based cycle notation, e.g. ``[(1, 15, 24), (2, 11)]``."""
    out = list(range(N))
    for cyc in cycles:
        for n, m in zip(cyc, list(cyc[1:]) + [cyc[0]]):
            out[n - 1] = m - 1
    return tuple(out)


def to_cycles(f: Perm) -> list[tuple[int, ...]]:
    seen, cycles = set(), []
    for start in range(len(f)):
        if start in seen or f[start] == start:
            continue
        cyc, n = [], start
        while n not in seen:
            seen.add(n)
            cyc.append(n + 1)
            n = f[n]
        cycles.append(tuple(cyc))
    return cycles


@dataclass
class PermAssignment:
    N: int
    images: dict[str, Perm]

    def __post_init__(self):
        self.images = {x: tuple(int(v) for v in p) for x, p in self.images.items()}
        for x, p in self.images.items():
            if sorted(p) != list(range(self.N)):
                raise KCubeError(f"image of {x} is not a permutation of {self.N} points")

    def __getitem__(self, x: str) -> Perm:
        return self.images[x]

    def to_dict(self) -> dict:
        return {"N": self.N, "images": {x: [n + 1 for n in p] for x, p in self.images.items()}}

    @classmethod
    def from_dict(cls, data: Mapping) -> PermAssignment:
        try:
            N = int(data["N"])
            images = {x: tuple(int(n) - 1 for n in p) for x, p in data["images"].items()}
        except (KeyError, TypeError, ValueError) as exc:
            raise KCubeError(f"malformed assignment document: {exc}") from exc
        return cls(N, images)

    def dump(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=1) + "\n", encoding="utf-8")


def load_assignment(path: str | Path) -> PermAssignment:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise KCubeError(f"{path}: invalid JSON: {exc}") from exc
    return PermAssignment.from_dict(data)


@dataclass
class HomCheck:
    ok: bool
    witnesses: list = field(default_factory=list)

    def __bool__(self):
        return self.ok


def verify_hom(s: KCubeStructure, q: PermAssignment) -> HomCheck:
    """Inverse compatibility and ``Q(a) Q(b) = Q(b') Q(a')`` for every relation."""
    bad = []
    missing = [x for x in s.letter_names if x not in q.images]
    if missing:
        return HomCheck(False, [("missing images", missing)])
    for x in s.letter_names:
        if q[s.inv(x)] != invert(q[x]):
            bad.append(("inverse", x))
    for sq in s.squares_sorted():
        for a, b, bp, ap in s.orbit(sq):
            if compose(q[a], q[b]) != compose(q[bp], q[ap]):
                bad.append(("relation", (a, b, bp, ap)))
                break
    return HomCheck(not bad, bad)


def lift(base: CubeComplex, tau: Mapping[str, Perm], N: int) -> CubeComplex:
    """N-sheeted cover of a one-vertex complex.

    The edge ``x^n`` runs from sheet ``n`` to sheet ``tau[x][n]``; squares are
    lifted by walking each base boundary from every sheet.
    """
    if len(base.vertices) != 1:
        raise KCubeError(f"can only lift one-vertex complexes, got {len(base.vertices)} vertices")
    for x in base.edges:
        if tau[base.inv(x)] != invert(tau[x]):
            raise KCubeError(f"sheet permutations of {x} and its inverse do not match")

    def name(x: str, n: int) -> str:
        return f"{x}^{n + 1}"

    edges: dict[str, DirectedEdge] = {}
    inverse: dict[str, str] = {}
    for x, e in base.edges.items():
        for n in range(N):
            m = tau[x][n]
            y = base.inv(x)
            if e.sign > 0:
                geom = name(x, n)
            else:
                geom = name(y, m)
            edges[name(x, n)] = DirectedEdge(name(x, n), n + 1, m + 1, e.color, geom, e.sign)
            inverse[name(x, n)] = name(y, m)

    squares = []
    for sq in sorted(base.squares):
        for n in range(N):
            walk, m = [], n
            for x in sq:
                walk.append(name(x, m))
                m = tau[x][m]
            if m != n:
                raise KCubeError(f"square {sq} does not close when lifted from sheet {n + 1}")
            squares.append(tuple(walk))

    cover = CubeComplex(
        tuple(range(1, N + 1)),
        edges,
        inverse,
        frozenset(squares),
        projection={v: base.vertices[0] for v in range(1, N + 1)},
        edge_projection={name(x, n): x for x in base.edges for n in range(N)},
        base=base,
    )
    if not cover.is_connected():
        warnings.warn(f"{N}-sheeted cover is disconnected", stacklevel=2)
    return cover


def double_cover(c: CubeComplex) -> CubeComplex:
    """Every edge swaps the two sheets: ``x^1`` runs 1 -> 2 and ``x^2`` runs 2 -> 1."""
    swap = (1, 0)
    return lift(c, {x: swap for x in c.edges}, 2)


def cover_from_hom(s: KCubeStructure, q: PermAssignment) -> CubeComplex:
    """Cover whose edge ``x^n`` ends at ``Q(x)^-1(n)``.

    With right-to-left composition this is the choice under which a lifted
    square closes exactly when ``Q(a) Q(b) = Q(b') Q(a')``.
    """
    check = verify_hom(s, q)
    if not check:
        raise KCubeError(f"assignment is not a homomorphism: {check.witnesses[:3]}")
    base = build_one_vertex_complex(s)
    tau = {x: invert(q[x]) for x in s.letter_names}
    return lift(base, tau, q.N)


def project_squares(cover: CubeComplex) -> set:
    """Images of the cover's squares in the base complex."""
    base, proj = cover.base, cover.edge_projection
    return {base.canonical_square(tuple(proj[x] for x in sq)) for sq in cover.squares}


# abelian p-quotients

def _rref_mod_p(A: np.ndarray, p: int) -> tuple[np.ndarray, list[int]]:
    A = A.copy() % p
    rows, cols = A.shape
    pivots = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.nonzero(A[r:, c])[0]
        if not len(nz):
            continue
        piv = r + nz[0]
        A[[r, piv]] = A[[piv, r]]
        A[r] = A[r] * pow(int(A[r, c]), -1, p) % p
        for rr in range(rows):
            if rr != r and A[rr, c]:
                A[rr] = (A[rr] - A[rr, c] * A[r]) % p
        pivots.append(c)
        r += 1
    return A[:r], pivots


def nullspace_mod_p(A: np.ndarray, p: int) -> np.ndarray:
    """Basis of ``{v : A v = 0 mod p}`` as rows."""
    n = A.shape[1]
    R, pivots = _rref_mod_p(A, p)
    free = [c for c in range(n) if c not in pivots]
    basis = []
    for f in free:
        v = np.zeros(n, dtype=np.int64)
        v[f] = 1
        for row, c in zip(R, pivots):
            v[c] = -row[f] % p
        basis.append(v)
    return np.array(basis, dtype=np.int64).reshape(len(basis), n)


def rank_mod_p(A: np.ndarray, p: int) -> int:
    if A.size == 0:
        return 0
    return len(_rref_mod_p(np.asarray(A, dtype=np.int64), p)[1])


def _rref_matrices(d: int, r: int, p: int):
    """Every r x d matrix over F_p in reduced row echelon form with r pivots."""
    for pivots in itertools.combinations(range(d), r):
        free = [(i, c) for i in range(r) for c in range(d) if c > pivots[i] and c not in pivots]
        for values in itertools.product(range(p), repeat=len(free)):
            C = np.zeros((r, d), dtype=np.int64)
            for i, c in enumerate(pivots):
                C[i, c] = 1
            for (i, c), val in zip(free, values):
                C[i, c] = val
            yield C


def abelian_relation_matrix(s: KCubeStructure) -> tuple[np.ndarray, list[str]]:
    """Rows: squares; columns: one letter per inverse pair; entries from ``a + b - b' - a'``."""
    reps = [x for x in s.letter_names if s.key(x) <= s.key(s.inv(x))]
    col = {x: n for n, x in enumerate(reps)}
    R = np.zeros((len(s.squares), len(reps)), dtype=np.int64)
    for r, sq in enumerate(s.squares_sorted()):
        for x, sign in zip(sq, (1, 1, -1, -1)):
            if x in col:
                R[r, col[x]] += sign
            else:
                R[r, col[s.inv(x)]] -= sign
    return R, reps


def regular_representation(vectors: Mapping[str, Sequence[int]], p: int, rank: int) -> PermAssignment:
    """Translations ``h -> h + v`` of ``(Z/p)^rank``, elements in lexicographic order."""
    elements = list(itertools.product(range(p), repeat=rank))
    index = {g: n for n, g in enumerate(elements)}
    images = {}
    for x, v in vectors.items():
        images[x] = tuple(index[tuple((g[c] + int(v[c])) % p for c in range(rank))] for g in elements)
    return PermAssignment(len(elements), images)


@dataclass
class AbelianSolution:
    vectors: dict[str, tuple[int, ...]]
    assignment: PermAssignment
    each_alphabet_generates: bool


def solve_abelian_quotient(
    s: KCubeStructure, p: int, rank: int, each_alphabet_generates: bool = False
) -> list[AbelianSolution]:
    """Surjections onto ``(Z/p)^rank`` up to automorphisms of the target.

    Such maps are the rank-dimensional subspaces of the mod-p solution space
    of the abelianized relations; each is returned once.
    """
    if rank not in (1, 2):
        raise KCubeError("rank must be 1 or 2")
    from .finite_field import is_prime

    if not is_prime(p) or p == 2:
        raise KCubeError(f"p must be an odd prime, got {p}")
    R, reps = abelian_relation_matrix(s)
    N = nullspace_mod_p(R, p)
    d = len(N)
    out = []
    for C in _rref_matrices(d, rank, p):
        V = (N.T @ C.T) % p  # one row per representative letter
        vec = {}
        for x, row in zip(reps, V):
            vec[x] = tuple(int(v) for v in row)
            vec[s.inv(x)] = tuple(int(-v % p) for v in row)
        gens = all(
            rank_mod_p(np.array([vec[x] for x in al.letters]), p) == rank for al in s.alphabets
        )
        if each_alphabet_generates and not gens:
            continue
        ordered = {x: vec[x] for x in s.letter_names}
        out.append(AbelianSolution(ordered, regular_representation(ordered, p, rank), gens))
    if not out:
        raise KCubeError(f"no surjection onto (Z/{p})^{rank} exists" + (
            " with every alphabet generating" if each_alphabet_generates else ""))
    return out
