"""k-cube group presentations.

A presentation is a tuple of alphabets (one per color, each with a
fixed-point-free inverse involution) plus square relations ``ab = b'a'``
between letters of two different colors.  Squares are stored canonically:
one representative per dihedral orbit of four equivalent relations.
"""

from __future__ import annotations

import json
import re
import string
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations
from pathlib import Path
from typing import Iterable, Mapping, NamedTuple, Sequence

from .finite_field import QuadraticField, irreducible_quadratics
from .validation import KCubeError, ValidationReport


class Letter(NamedTuple):
    name: str
    color: int


class SquareRelation(NamedTuple):
    """The relation ``a b = b_prime a_prime``."""

    a: str
    b: str
    b_prime: str
    a_prime: str


@dataclass(frozen=True)
class Alphabet:
    color: int
    letters: tuple[str, ...]
    inverse: Mapping[str, str]

    def __post_init__(self):
        object.__setattr__(self, "letters", tuple(self.letters))
        object.__setattr__(self, "inverse", dict(self.inverse))

    def __len__(self):
        return len(self.letters)

    def __iter__(self):
        return iter(self.letters)

    def __hash__(self):
        return hash((self.color, self.letters, tuple(sorted(self.inverse.items()))))

    @classmethod
    def paired(cls, color: int, letters: Sequence[str]) -> Alphabet:
        """Alphabet where letter ``r`` and letter ``r + L`` are mutually inverse."""
        half = len(letters) // 2
        inverse = {}
        for r in range(half):
            inverse[letters[r]] = letters[r + half]
            inverse[letters[r + half]] = letters[r]
        return cls(color, tuple(letters), inverse)


@dataclass(frozen=True, eq=False)
class KCubeStructure:
    k: int
    alphabets: tuple[Alphabet, ...]
    squares: frozenset[SquareRelation] = field(default_factory=frozenset)

    def __post_init__(self):
        alphabets = tuple(sorted(self.alphabets, key=lambda al: al.color))
        object.__setattr__(self, "alphabets", alphabets)
        seen = Counter(x for al in alphabets for x in al.letters)
        dupes = sorted(x for x, n in seen.items() if n > 1)
        if dupes:
            raise KCubeError(f"duplicate letter names: {dupes}")
        for al in alphabets:
            for x, y in al.inverse.items():
                if x not in al.letters or y not in al.letters:
                    raise KCubeError(f"inverse map of color {al.color} leaves the alphabet: {x}->{y}")
        squares = set()
        for sq in self.squares:
            sq = SquareRelation(*sq)
            unknown = [x for x in sq if x not in seen]
            if unknown:
                raise KCubeError(f"square {tuple(sq)} references unknown letters {unknown}")
            squares.add(self.canonical(sq))
        object.__setattr__(self, "squares", frozenset(squares))

    def __eq__(self, other):
        if not isinstance(other, KCubeStructure):
            return NotImplemented
        return (self.k, self.alphabets, self.squares) == (other.k, other.alphabets, other.squares)

    def __hash__(self):
        return hash((self.k, self.alphabets, self.squares))

    def __repr__(self):
        sizes = tuple(len(al) for al in self.alphabets)
        return f"KCubeStructure(k={self.k}, sizes={sizes}, squares={len(self.squares)})"

    # letter bookkeeping

    @cached_property
    def _color(self) -> dict[str, int]:
        return {x: al.color for al in self.alphabets for x in al.letters}

    @cached_property
    def _key(self) -> dict[str, tuple[int, int]]:
        return {x: (al.color, n) for al in self.alphabets for n, x in enumerate(al.letters)}

    @cached_property
    def _inverse(self) -> dict[str, str]:
        return {x: y for al in self.alphabets for x, y in al.inverse.items()}

    @property
    def colors(self) -> list[int]:
        return [al.color for al in self.alphabets]

    @property
    def letter_names(self) -> list[str]:
        return [x for al in self.alphabets for x in al.letters]

    @property
    def letters(self) -> list[Letter]:
        return [Letter(x, al.color) for al in self.alphabets for x in al.letters]

    def alphabet(self, color: int) -> Alphabet:
        for al in self.alphabets:
            if al.color == color:
                return al
        raise KeyError(color)

    def color(self, x: str) -> int:
        return self._color[x]

    def inv(self, x: str) -> str:
        return self._inverse[x]

    def key(self, x: str) -> tuple[int, int]:
        return self._key[x]

    def sizes(self) -> tuple[int, ...]:
        return tuple(len(al) for al in self.alphabets)

    # squares

    def orbit(self, sq: SquareRelation) -> list[SquareRelation]:
        """The four equivalent forms of ``ab = b'a'``, all led by a letter of color(a)."""
        a, b, bp, ap = sq
        inv = self.inv
        return [
            SquareRelation(a, b, bp, ap),
            SquareRelation(inv(a), bp, b, inv(ap)),
            SquareRelation(inv(ap), inv(bp), inv(b), inv(a)),
            SquareRelation(ap, inv(b), inv(bp), a),
        ]

    def canonical(self, sq) -> SquareRelation:
        a, b, bp, ap = sq
        if self._key[a] > self._key[b]:
            # b'a' = ab, read with the lower color first
            a, b, bp, ap = bp, ap, a, b
        return min(self.orbit(SquareRelation(a, b, bp, ap)), key=lambda s: tuple(self._key[x] for x in s))

    @cached_property
    def _relations(self) -> dict[tuple[str, str], list[tuple[str, str]]]:
        table = defaultdict(list)
        for sq in sorted(self.squares):
            for a, b, bp, ap in self.orbit(sq):
                table[a, b].append((bp, ap))
                table[bp, ap].append((a, b))
        return dict(table)

    def complete(self, x: str, y: str) -> tuple[str, str]:
        """The unique ``(y', x')`` with ``x y = y' x'``."""
        found = self._relations.get((x, y), [])
        if len(found) != 1:
            raise KCubeError(f"pair ({x}, {y}) lies in {len(found)} square relations")
        return found[0]

    def phi_table(self) -> dict[tuple[str, str], tuple[str, str]]:
        return {pair: found[0] for pair, found in self._relations.items() if len(found) == 1}

    def squares_sorted(self) -> list[SquareRelation]:
        return sorted(self.squares, key=lambda s: tuple(self._key[x] for x in s))

    def replace_square(self, old, new) -> KCubeStructure:
        old = self.canonical(old)
        if old not in self.squares:
            raise KCubeError(f"square {tuple(old)} not present")
        return KCubeStructure(self.k, self.alphabets, (self.squares - {old}) | {self.canonical(new)})

    # serialization

    def to_dict(self, relators: bool = False) -> dict:
        out = {
            "k": self.k,
            "alphabets": [
                {"color": al.color, "letters": list(al.letters), "inverse": dict(al.inverse)}
                for al in self.alphabets
            ],
        }
        if relators:
            out["relators"] = [list(r) for r in to_relators(self)]
        else:
            out["squares"] = [list(s) for s in self.squares_sorted()]
        return out


def validate_structure(s: KCubeStructure) -> ValidationReport:
    """Check the local axioms of a k-cube structure on a presentation.

    Simple transitivity on a product of trees is a statement about 3-cubes
    and is checked on the digraph instead.
    """
    report = ValidationReport()

    bad = []
    if len(s.alphabets) != s.k or sorted(s.colors) != list(range(1, s.k + 1)):
        bad.append(("colors", s.colors))
    for al in s.alphabets:
        if len(al) < 2 or len(al) % 2:
            bad.append(("odd or empty alphabet", al.color, len(al)))
        for x in al.letters:
            y = al.inverse.get(x)
            if y is None:
                bad.append(("no inverse", x))
            elif y == x:
                bad.append(("fixed point", x))
            elif al.inverse.get(y) != x:
                bad.append(("not an involution", x, y))
    report.add("involution", bad, "inverses are fixed-point-free involutions on each alphabet")

    # the group is defined by this presentation, so the letters generate it
    report.add("generation", [], "letters generate the presented group")

    bad = []
    for sq in s.squares_sorted():
        a, b, bp, ap = sq
        if not (s.color(a) == s.color(ap) != s.color(b) == s.color(bp)):
            bad.append(("colors", tuple(sq)))
    rel = s._relations
    for al1, al2 in combinations(s.alphabets, 2):
        for x in al1.letters:
            for y in al2.letters:
                for pair in ((x, y), (y, x)):
                    n = len(rel.get(pair, []))
                    if n != 1:
                        bad.append(("pair covered %d times" % n, pair))
    for al1, al2 in combinations(s.alphabets, 2):
        n = sum(1 for sq in s.squares if {s.color(sq.a), s.color(sq.b)} == {al1.color, al2.color})
        want = len(al1) * len(al2) / 4
        if n != want:
            bad.append(("square count", (al1.color, al2.color), n, want))
    report.add("product_sets", bad, "each bicolored pair lies in exactly one relation")

    bad = [tuple(sq) for sq in s.squares_sorted() if sq.a_prime == s.inv(sq.a) and sq.b_prime == s.inv(sq.b)]
    report.add("no_2_torsion", bad, "no relation ab = b^-1 a^-1")
    return report


# relators

_TOKEN = re.compile(r"([A-Za-z_]+\d*)(\^-1|⁻¹)?")


def parse_word(word: str | Sequence[str], s_or_inverse) -> list[str]:
    """Split ``"a1b2a17b22"`` or ``"a b a^-1 b^-1"`` into letter names."""
    inv = s_or_inverse.inv if isinstance(s_or_inverse, KCubeStructure) else s_or_inverse.__getitem__
    if not isinstance(word, str):
        tokens = [(t[:-3], True) if t.endswith("^-1") else (t, False) for t in word]
    else:
        text = word.replace(" ", "")
        tokens = []
        pos = 0
        for m in _TOKEN.finditer(text):
            if m.start() != pos:
                raise KCubeError(f"cannot parse word {word!r}")
            tokens.append((m.group(1), bool(m.group(2))))
            pos = m.end()
        if pos != len(text):
            raise KCubeError(f"cannot parse word {word!r}")
    out = []
    for name, inverted in tokens:
        try:
            out.append(inv(name) if inverted else inv(inv(name)))
        except KeyError:
            raise KCubeError(f"unknown letter {name!r} in {word!r}") from None
    return out


def from_relators(k: int, alphabets: Sequence[Alphabet], relators: Iterable) -> KCubeStructure:
    """Build a structure from relators ``e1 e2 e3 e4 = 1``, i.e. ``e1 e2 = e4^-1 e3^-1``."""
    skeleton = KCubeStructure(k, tuple(alphabets))
    squares = []
    for r in relators:
        word = parse_word(r, skeleton)
        if len(word) != 4:
            raise KCubeError(f"relator {r!r} has length {len(word)}, expected 4")
        e1, e2, e3, e4 = word
        c = [skeleton.color(e) for e in word]
        if not (c[0] == c[2] != c[1] == c[3]):
            raise KCubeError(f"relator {r!r} does not alternate two colors: {c}")
        squares.append(SquareRelation(e1, e2, skeleton.inv(e4), skeleton.inv(e3)))
    canon = Counter(skeleton.canonical(sq) for sq in squares)
    repeated = [tuple(sq) for sq, n in canon.items() if n > 1]
    if repeated:
        raise KCubeError(f"relators repeat the squares {repeated}")
    s = KCubeStructure(k, skeleton.alphabets, squares)
    for pair, found in s._relations.items():
        if len(found) > 1:
            raise KCubeError(f"pair {pair} is covered by {len(found)} relators")
    return s


def to_relators(s: KCubeStructure) -> list[tuple[str, str, str, str]]:
    return [(a, b, s.inv(ap), s.inv(bp)) for a, b, bp, ap in s.squares_sorted()]


# RSV arithmetic family

def _prefix(color: int) -> str:
    if color > len(string.ascii_lowercase):
        raise KCubeError("at most 26 colors are supported")
    return string.ascii_lowercase[color - 1]


def rsv_structure(q: int, poly: tuple[int, int], delta, residues: Iterable[int]) -> KCubeStructure:
    """The RSV presentation for the cosets of ``(q-1)Z/(q^2-1)Z`` listed in ``residues``.

    ``poly = (b, c)`` names the field polynomial ``x^2 + b x + c`` and ``delta``
    is a pair ``(u0, u1)`` meaning ``u0 + u1 x``.
    """
    field_ = QuadraticField(q, poly)
    delta = field_.element(delta)
    log = field_.log_table(delta)
    n = field_.order
    power = {i: e for e, i in log.items()}

    residues = [int(r) for r in residues]
    reduced = [r % (q - 1) for r in residues]
    if 0 in reduced:
        raise KCubeError("residue class 0 mod (q-1) is not supported")
    if len(set(reduced)) != len(reduced):
        raise KCubeError(f"residues must be distinct mod {q - 1}: {residues}")
    if not reduced:
        raise KCubeError("no residues given")
    order = sorted(reduced)
    color_of = {r: c for c, r in enumerate(order, start=1)}

    def name(i: int) -> str:
        return f"{_prefix(color_of[i % (q - 1)])}{i}"

    alphabets = []
    for r in order:
        idx = list(range(r, n, q - 1))
        inverse = {name(i): name((i + n // 2) % n) for i in idx}
        alphabets.append(Alphabet(color_of[r], tuple(name(i) for i in idx), inverse))

    members = [i for r in order for i in range(r, n, q - 1)]
    squares = []
    for i in members:
        for j in members:
            if color_of[i % (q - 1)] >= color_of[j % (q - 1)]:
                continue
            x = log[field_.add((1, 0), power[(j - i) % n])]
            y = (x + i - j) % n
            l = (i - x * (q - 1)) % n
            kk = (j - y * (q - 1)) % n
            squares.append(SquareRelation(name(i), name(j), name(kk), name(l)))
    return KCubeStructure(len(order), tuple(alphabets), squares)


def search_rsv(q: int, residues: Iterable[int], target: KCubeStructure) -> list[tuple[tuple[int, int], tuple[int, int]]]:
    """All ``(poly, delta)`` whose RSV structure has exactly the squares of ``target``."""
    residues = list(residues)
    hits = []
    for poly in irreducible_quadratics(q):
        field_ = QuadraticField(q, poly)
        for delta in field_.generators():
            s = rsv_structure(q, poly, delta, residues)
            if s.alphabets == target.alphabets and s.squares == target.squares:
                hits.append((poly, delta))
    return hits


# JSON IO

def structure_from_dict(data: Mapping) -> KCubeStructure:
    try:
        k = int(data["k"])
        alphabets = tuple(
            Alphabet(int(al["color"]), tuple(al["letters"]), dict(al["inverse"])) for al in data["alphabets"]
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise KCubeError(f"malformed structure document: {exc}") from exc
    has_sq, has_rel = "squares" in data, "relators" in data
    if has_sq == has_rel:
        raise KCubeError("structure document needs exactly one of 'squares' or 'relators'")
    if has_rel:
        return from_relators(k, alphabets, data["relators"])
    squares = []
    for sq in data["squares"]:
        if len(sq) != 4:
            raise KCubeError(f"square {sq!r} must have 4 entries")
        squares.append(SquareRelation(*sq))
    return KCubeStructure(k, alphabets, squares)


def load_structure(path: str | Path) -> KCubeStructure:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise KCubeError(f"{path}: invalid JSON: {exc}") from exc
    return structure_from_dict(data)


def dump_structure(s: KCubeStructure, path: str | Path, relators: bool = False) -> None:
    Path(path).write_text(json.dumps(s.to_dict(relators), indent=1) + "\n", encoding="utf-8")
