"""Eigenvalues, Ramanujan checks, period lattices and the type-III lambda."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from typing import Sequence

import numpy as np

from .digraph import ColoredDigraph, strongly_connected
from .validation import KCubeError

# above this size the Python-level rotation loop gets slow; hand over to LAPACK
JACOBI_MAX_N = 120


def _check_symmetric(M: np.ndarray) -> np.ndarray:
    M = np.asarray(M)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise KCubeError(f"matrix must be square, got shape {M.shape}")
    if np.issubdtype(M.dtype, np.integer):
        ok = (M == M.T).all()
    else:
        ok = np.allclose(M, M.T, rtol=0, atol=1e-12 * max(1.0, float(np.abs(M).max(initial=0))))
    if not ok:
        raise KCubeError("matrix is not symmetric")
    return M


def jacobi_eigenvalues(M: np.ndarray, tol: float = 1e-12, max_sweeps: int = 100) -> np.ndarray:
    """Cyclic Jacobi: rotate away each off-diagonal entry in turn until the
    off-diagonal Frobenius norm drops below ``tol * ||M||_F``."""
    A = np.array(_check_symmetric(M), dtype=float)
    n = A.shape[0]
    scale = np.linalg.norm(A)
    if n < 2 or scale == 0:
        return np.sort(np.diag(A))[::-1]
    # rounding keeps the off-diagonal mass near n * eps * ||M||; never ask for less
    threshold = max(tol, n * np.finfo(float).eps) * scale
    for _ in range(max_sweeps):
        off = math.sqrt(2 * np.sum(np.triu(A, 1) ** 2))
        if off < threshold:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                if abs(apq) < 1e-300:
                    continue
                theta = (A[q, q] - A[p, p]) / (2 * apq)
                t = math.copysign(1.0, theta) / (abs(theta) + math.hypot(1.0, theta))
                c = 1 / math.hypot(1.0, t)
                s = t * c
                cp, cq = A[:, p].copy(), A[:, q].copy()
                A[:, p], A[:, q] = c * cp - s * cq, s * cp + c * cq
                rp, rq = A[p, :].copy(), A[q, :].copy()
                A[p, :], A[q, :] = c * rp - s * rq, s * rp + c * rq
    else:
        raise KCubeError(f"Jacobi did not converge in {max_sweeps} sweeps")
    return np.sort(np.diag(A))[::-1]


def symmetric_eigenvalues(M, tol: float = 1e-12, method: str = "auto") -> np.ndarray:
    """Eigenvalues of a symmetric matrix, sorted descending."""
    M = _check_symmetric(np.asarray(M))
    if method == "auto":
        method = "jacobi" if M.shape[0] <= JACOBI_MAX_N else "lapack"
    if method == "jacobi":
        return jacobi_eigenvalues(M, tol)
    if method == "lapack":
        return np.sort(np.linalg.eigvalsh(np.asarray(M, dtype=float)))[::-1]
    raise KCubeError(f"unknown eigen method {method!r}")


def spectral_radius_vector(matrices: Sequence[np.ndarray]) -> tuple[float, ...]:
    shapes = {np.asarray(M).shape for M in matrices}
    if len(shapes) != 1 or any(len(s) != 2 or s[0] != s[1] for s in shapes):
        raise KCubeError("matrices must be square and of one size")
    out = []
    for M in matrices:
        M = np.asarray(M)
        if (M == M.T).all():
            ev = symmetric_eigenvalues(M)
        else:
            ev = np.linalg.eigvals(M.astype(float))
        out.append(float(np.max(np.abs(ev))))
    return tuple(out)


@dataclass
class SpectralReport:
    color: int
    L: int
    eigenvalues: list[float]
    trivial: list[float]
    lambda2: float | None
    bound: float
    mode: str
    ramanujan: bool
    max_abs_nontrivial: float | None = None

    def to_dict(self) -> dict:
        return {
            "color": self.color,
            "L": self.L,
            "eigenvalues": [round(v, 9) for v in self.eigenvalues],
            "trivial": [round(v, 9) for v in self.trivial],
            "lambda2": None if self.lambda2 is None else round(self.lambda2, 9),
            "max_abs_nontrivial": None if self.max_abs_nontrivial is None else round(self.max_abs_nontrivial, 9),
            "bound": round(self.bound, 9),
            "mode": self.mode,
            "ramanujan": self.ramanujan,
        }


def regularity(M: np.ndarray) -> int:
    sums = np.asarray(M).sum(axis=1)
    if len(sums) == 0 or not (sums == sums[0]).all():
        raise KCubeError(f"matrix is not regular: row sums {sorted(set(sums.tolist()))}")
    return int(sums[0])


def ramanujan_check(M, mode: str = "kgraph", color: int = 1, tol: float = 1e-6,
                    eigenvalues: np.ndarray | None = None) -> SpectralReport:
    """Ramanujan verdict for one L-regular coordinate matrix.

    cubical: every eigenvalue other than +-L is at most 2 sqrt(L - 1).
    kgraph:  the largest positive eigenvalue below L is at most 2 sqrt(L - 1).
    """
    M = np.asarray(M)
    L = regularity(M)
    ev = symmetric_eigenvalues(M) if eigenvalues is None else np.asarray(eigenvalues)
    bound = 2 * math.sqrt(max(L - 1, 0))
    trivial = [float(v) for v in ev if abs(abs(v) - L) <= tol]
    rest = [float(v) for v in ev if abs(abs(v) - L) > tol]
    max_abs = max((abs(v) for v in rest), default=None)
    if mode == "cubical":
        lam2 = max(rest, default=None)
        ok = all(v <= bound + tol for v in rest)
    elif mode == "kgraph":
        positive = [float(v) for v in ev if tol < v < L - tol]
        lam2 = max(positive, default=None)
        ok = lam2 is None or lam2 <= bound + tol
    else:
        raise KCubeError(f"unknown Ramanujan mode {mode!r}")
    return SpectralReport(color, L, [float(v) for v in ev], trivial, lam2, bound, mode, ok, max_abs)


def power_entries(M, power: int) -> tuple[set[int], set[int]]:
    """Diagonal and off-diagonal entry sets of ``M ** power``, in exact integers."""
    P = np.linalg.matrix_power(np.asarray(M, dtype=object), power)
    n = P.shape[0]
    diag = {int(P[i, i]) for i in range(n)}
    off = {int(P[i, j]) for i in range(n) for j in range(n) if i != j}
    return diag, off


def find_isomorphism(A, B) -> list[int] | None:
    """A vertex bijection ``pi`` with ``B[pi[i], pi[j]] == A[i, j]``, or None."""
    import networkx as nx
    from networkx.algorithms.isomorphism import DiGraphMatcher, numerical_edge_match

    A, B = np.asarray(A), np.asarray(B)
    if A.shape != B.shape:
        return None
    GA = nx.from_numpy_array(A, create_using=nx.DiGraph)
    GB = nx.from_numpy_array(B, create_using=nx.DiGraph)
    matcher = DiGraphMatcher(GA, GB, edge_match=numerical_edge_match("weight", 0))
    if not matcher.is_isomorphic():
        return None
    return [matcher.mapping[i] for i in range(A.shape[0])]


# period lattice

def hermite_normal_form(rows: Sequence[Sequence[int]]) -> list[list[int]]:
    """Row-style HNF: upper triangular, positive pivots, entries above a pivot
    reduced into ``[0, pivot)``; zero rows dropped."""
    A = [list(map(int, r)) for r in rows if any(r)]
    if not A:
        return []
    ncols = len(A[0])
    r = 0
    for c in range(ncols):
        if r == len(A):
            break
        # Euclid on column c over rows r..end
        while True:
            nz = [i for i in range(r, len(A)) if A[i][c] != 0]
            if not nz:
                break
            piv = min(nz, key=lambda i: abs(A[i][c]))
            A[r], A[piv] = A[piv], A[r]
            done = True
            for i in range(r + 1, len(A)):
                if A[i][c]:
                    f = A[i][c] // A[r][c]
                    A[i] = [a - f * b for a, b in zip(A[i], A[r])]
                    if A[i][c]:
                        done = False
            if done:
                break
        if A[r][c] == 0:
            continue
        if A[r][c] < 0:
            A[r] = [-a for a in A[r]]
        for i in range(r):
            f = A[i][c] // A[r][c]
            A[i] = [a - f * b for a, b in zip(A[i], A[r])]
        r += 1
    return [row for row in A[:r] if any(row)]


@dataclass
class PeriodLattice:
    k: int
    basis: list[list[int]]
    bound: int
    generators: list[tuple[int, ...]] = field(default_factory=list)
    witnesses: dict = field(default_factory=dict)
    lower_bound: bool = True

    def contains(self, v: Sequence[int]) -> bool:
        v = list(map(int, v))
        for row in self.basis:
            c = next(i for i, a in enumerate(row) if a)
            if v[c] % row[c]:
                return False
            f = v[c] // row[c]
            v = [a - f * b for a, b in zip(v, row)]
        return not any(v)

    @property
    def rank(self) -> int:
        return len(self.basis)

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "basis": self.basis,
            "bound": self.bound,
            "generators": [list(g) for g in self.generators],
            "lower_bound": self.lower_bound,
        }


def period_lattice(dg: ColoredDigraph, max_degree_sum: int = 4, base=None) -> PeriodLattice:
    """Sublattice of the period group spanned by cycles at ``base`` of length
    at most ``max_degree_sum``.  Longer cycles may enlarge it."""
    if not strongly_connected(dg):
        raise KCubeError("period lattice needs a strongly connected digraph")
    k = dg.k
    v0 = dg.vertices[0] if base is None else base
    zero = (0,) * k
    # reachable (vertex, degree) states with one witness path each
    frontier = {(v0, zero): ()}
    seen = dict(frontier)
    for _ in range(max_degree_sum):
        nxt = {}
        for (v, d), path in frontier.items():
            for x in dg.out_edges[v]:
                e = dg.edges[x]
                nd = list(d)
                nd[e.color - 1] += 1
                state = (e.terminus, tuple(nd))
                if state not in seen and state not in nxt:
                    nxt[state] = path + (x,)
        seen.update(nxt)
        frontier = nxt
    cycles = {d: path for (v, d), path in seen.items() if v == v0 and d != zero}
    generators = sorted(cycles)
    witnesses = {g: (cycles[g], ()) for g in generators}
    return PeriodLattice(k, hermite_normal_form(generators), max_degree_sum, generators, witnesses)


@dataclass
class FactorType:
    lam: float
    exact: Fraction | None
    tau: float
    dense: bool

    def to_dict(self) -> dict:
        return {
            "lambda": self.lam,
            "exact": None if self.exact is None else str(self.exact),
            "tau": self.tau,
            "dense": self.dense,
        }


def factor_type_lambda(rho: Sequence[float], lattice: PeriodLattice, tol: float = 1e-9,
                       max_coeff: int = 1000) -> FactorType:
    """``sup{rho^g < 1 : g in P}``: ``exp(-tau)`` when ``{<log rho, g>}`` is the
    cyclic group ``tau Z``, and 1 when it is dense or trivial.

    Two values count as commensurable when their ratio is within ``tol`` of a
    fraction with denominator at most ``max_coeff``.  Keep
    ``max_coeff ** 2 * tol`` small: convergents approximate any real to about
    ``1 / q ** 2``, so a large bound would call everything commensurable.
    """
    if any(r <= 1 for r in rho):
        raise KCubeError(f"spectral radii must exceed 1, got {tuple(rho)}")
    logs = [math.log(r) for r in rho]
    t = [sum(g * l for g, l in zip(row, logs)) for row in lattice.basis]
    scale = max((abs(v) for v in t), default=0.0)
    t = [v for v in t if abs(v) > tol * max(scale, 1.0)]
    if not t:
        return FactorType(1.0, Fraction(1), 0.0, False)
    t0 = t[0]
    ratios = []
    for v in t:
        r = v / t0
        f = Fraction(r).limit_denominator(max_coeff)
        if abs(float(f) - r) > tol * max(1.0, abs(r)) or abs(f.numerator) > max_coeff:
            return FactorType(1.0, Fraction(1), 0.0, True)
        ratios.append(f)
    den = reduce(math.lcm, (f.denominator for f in ratios), 1)
    num = reduce(math.gcd, (abs(f.numerator * (den // f.denominator)) for f in ratios), 0)
    tau = abs(t0) * num / den
    exact = None
    ints = {round(r) for r in rho}
    if len(ints) == 1 and all(abs(r - round(r)) < tol for r in rho):
        # equal integer radii: tau = g* log rho with g* the gcd of row sums
        g = reduce(math.gcd, (abs(sum(row)) for row in lattice.basis), 0)
        exact = Fraction(1, ints.pop() ** g)
    return FactorType(math.exp(-tau), exact, tau, False)
