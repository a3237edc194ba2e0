"""Named presets: the embedded example presentations and the 25x25 matrix."""

from __future__ import annotations

import os
import re
from importlib import resources
from pathlib import Path

import numpy as np

from .structures import Alphabet, KCubeStructure, load_structure, _prefix
from .validation import KCubeError

PRESETS = ("gamma1", "gamma2", "torus", "vh44", "free_product", "matrix25")


def fixture_dir() -> Path:
    override = os.environ.get("KCUBE_FIXTURES")
    if override:
        return Path(override)
    return Path(str(resources.files("kcube") / "data"))


def free_product(*L: int) -> KCubeStructure:
    """Product of free groups F_L1 x ... x F_Lk, every pair of colors commuting."""
    if len(L) < 2 or any(int(x) < 1 for x in L):
        raise KCubeError(f"free_product needs k >= 2 positive ranks, got {L}")
    alphabets = []
    for color, n in enumerate(L, start=1):
        p = _prefix(color)
        alphabets.append(Alphabet.paired(color, [f"{p}{r}" for r in range(1, 2 * int(n) + 1)]))
    squares = []
    for i, A in enumerate(alphabets):
        for B in alphabets[i + 1:]:
            squares.extend((a, b, b, a) for a in A.letters for b in B.letters)
    return KCubeStructure(len(L), tuple(alphabets), squares)


def load_matrix(path: str | Path) -> np.ndarray:
    return parse_matrix(Path(path).read_text(encoding="utf-8"), str(path))


def parse_matrix(text: str, path: str = "<matrix>") -> np.ndarray:
    """Whitespace-separated integer rows."""
    rows = [line.split() for line in text.splitlines() if line.strip()]
    try:
        M = np.array([[int(v) for v in row] for row in rows], dtype=np.int64)
    except ValueError as exc:
        raise KCubeError(f"{path}: non-integer matrix entry: {exc}") from exc
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise KCubeError(f"{path}: matrix is not square")
    return M


def parse_preset(name: str) -> tuple[str, tuple[int, ...]]:
    """``"free_product:2,2"`` or ``"free_product(2,2)"`` -> ``("free_product", (2, 2))``."""
    m = re.fullmatch(r"\s*(\w+?)\s*(?:[:(]\s*([\d,\s]*)\)?)?\s*", name)
    if not m:
        raise KCubeError(f"unknown preset {name!r}")
    args = tuple(int(x) for x in re.findall(r"\d+", m.group(2) or ""))
    return m.group(1), args


def preset(name: str):
    base, args = parse_preset(name)
    if base == "free_product":
        return free_product(*args)
    if args:
        raise KCubeError(f"preset {base!r} takes no arguments")
    if base == "matrix25":
        return load_matrix(fixture_dir() / "matrix25.txt")
    if base in ("gamma1", "gamma2", "torus", "vh44"):
        return load_structure(fixture_dir() / f"{base}.json")
    raise KCubeError(f"unknown preset {name!r}; choose from {', '.join(PRESETS)}")
