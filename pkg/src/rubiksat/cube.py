"""Facelet model of the 3x3x3 cube.

Faces are numbered 1..6 = front, left, back, right, up, down.  A state is a
flat array of 54 colors indexed ``9 * (face - 1) + position``, positions 0..8
row-major with 4 the center.  Color ``c`` is the color of face ``c + 1`` in
the solved state.

Side faces are read with the up face above them.  The up face is read with
row 0 against the back face, the down face with row 0 against the front face.
All 18 move permutations are derived from a 3-D sticker model at import time.
"""
from __future__ import annotations

import enum
import random
import re
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from ._accel import USE_NUMBA, kernel

N_FACELETS = 54
CENTER = 4
FACE_LETTERS = "FLBRUD"


class Face(enum.IntEnum):
    FRONT = 1
    LEFT = 2
    BACK = 3
    RIGHT = 4
    UP = 5
    DOWN = 6

    @property
    def letter(self) -> str:
        return FACE_LETTERS[self - 1]

    @property
    def opposite(self) -> "Face":
        return Face(OPPOSITE[self])


OPPOSITE = {1: 3, 3: 1, 2: 4, 4: 2, 5: 6, 6: 5}


class Variant(enum.IntEnum):
    CW = 0
    CCW = 1
    HALF = 2


# Move-type order used everywhere (SAT variables, move indices): u d l r f b.
TYPE_FACES = (Face.UP, Face.DOWN, Face.LEFT, Face.RIGHT, Face.FRONT, Face.BACK)
TYPE_NAMES = "udlrfb"
_SUFFIX = {Variant.CW: "", Variant.CCW: "'", Variant.HALF: "2"}


class Move(NamedTuple):
    face: Face
    variant: Variant

    @property
    def type_index(self) -> int:
        return TYPE_FACES.index(self.face)

    @property
    def index(self) -> int:
        return 3 * self.type_index + int(self.variant)

    @property
    def inverse(self) -> "Move":
        if self.variant == Variant.HALF:
            return self
        return Move(self.face, Variant.CCW if self.variant == Variant.CW else Variant.CW)

    def __str__(self) -> str:
        return self.face.letter + _SUFFIX[self.variant]


MOVES: tuple[Move, ...] = tuple(Move(f, v) for f in TYPE_FACES for v in Variant)
assert all(m.index == i for i, m in enumerate(MOVES))

# Moves kept in phase two: all up/down turns plus half turns of the side faces.
A10: frozenset[Move] = frozenset(
    m for m in MOVES if m.face in (Face.UP, Face.DOWN) or m.variant == Variant.HALF
)

# Opposite-face pairs that are never generated in the second-then-first order:
# "D U", "R L" and "B F" are redundant orderings of commuting turns.
_BANNED_PAIRS = {(Face.DOWN, Face.UP), (Face.RIGHT, Face.LEFT), (Face.BACK, Face.FRONT)}


def may_follow(prev: Face, nxt: Face) -> bool:
    """Canonical-sequence rule: no repeated face, opposite faces in fixed order."""
    return prev != nxt and (prev, nxt) not in _BANNED_PAIRS


FOLLOW_OK = np.array(
    [[may_follow(a, b) for b in TYPE_FACES] for a in TYPE_FACES], dtype=np.bool_
)


class ManeuverParseError(ValueError):
    def __init__(self, token: int, text: str):
        super().__init__(f"unrecognized move at token {token}: {text!r}")
        self.token = token


class Maneuver(tuple):
    """An immutable sequence of moves; ``str()`` gives Singmaster text."""

    def __new__(cls, moves: Iterable[Move] = ()):
        return super().__new__(cls, tuple(moves))

    @classmethod
    def parse(cls, text: str) -> "Maneuver":
        return parse_maneuver(text)

    def __str__(self) -> str:
        return format_maneuver(self)

    def __repr__(self) -> str:
        return f"Maneuver({str(self)!r})"

    def __add__(self, other):
        return Maneuver(tuple(self) + tuple(other))

    def __getitem__(self, item):
        out = super().__getitem__(item)
        return Maneuver(out) if isinstance(item, slice) else out

    def inverse(self) -> "Maneuver":
        return Maneuver(m.inverse for m in reversed(self))


_TOKEN = re.compile(r"\s*([A-Za-z])(['′’]|2)?")


def parse_maneuver(text: str) -> Maneuver:
    moves = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        token_no = len(moves) + 1
        if m is None or m.group(1) not in FACE_LETTERS:
            bad = text[pos:].split()[0] if text[pos:].split() else text[pos:]
            raise ManeuverParseError(token_no, bad)
        face = Face(FACE_LETTERS.index(m.group(1)) + 1)
        suffix = m.group(2)
        variant = Variant.CW if not suffix else Variant.HALF if suffix == "2" else Variant.CCW
        moves.append(Move(face, variant))
        pos = m.end()
        while pos < len(text) and text[pos].isspace():
            pos += 1
    return Maneuver(moves)


def format_maneuver(mv: Iterable[Move]) -> str:
    return " ".join(str(m) for m in mv)


def inverse(mv: Sequence[Move]) -> Maneuver:
    return Maneuver(mv).inverse()


# --- geometry -------------------------------------------------------------

_NORMALS = {
    Face.FRONT: (0, 0, 1),
    Face.LEFT: (-1, 0, 0),
    Face.BACK: (0, 0, -1),
    Face.RIGHT: (1, 0, 0),
    Face.UP: (0, 1, 0),
    Face.DOWN: (0, -1, 0),
}


def _cubie_position(face: Face, pos: int) -> tuple[int, int, int]:
    r, c = divmod(pos, 3)
    if face == Face.FRONT:
        return (c - 1, 1 - r, 1)
    if face == Face.LEFT:
        return (-1, 1 - r, c - 1)
    if face == Face.BACK:
        return (1 - c, 1 - r, -1)
    if face == Face.RIGHT:
        return (1, 1 - r, 1 - c)
    if face == Face.UP:
        return (c - 1, 1, r - 1)
    return (c - 1, -1, 1 - r)


def _cross(a, b):
    return (a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0])


def _dot(a, b):
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]


def _rotate_cw(v, n):
    # clockwise quarter turn seen from outside = -90 degrees about the outward normal
    k = _cross(n, v)
    d = _dot(n, v)
    return tuple(-k[i] + n[i] * d for i in range(3))


_STICKERS = [(_cubie_position(Face(f), p), _NORMALS[Face(f)]) for f in range(1, 7) for p in range(9)]
_STICKER_INDEX = {s: i for i, s in enumerate(_STICKERS)}


def _quarter_turn_table(face: Face) -> np.ndarray:
    n = _NORMALS[face]
    table = np.arange(N_FACELETS)
    for src, (p, q) in enumerate(_STICKERS):
        if _dot(p, n) == 1:
            dest = _STICKER_INDEX[(_rotate_cw(p, n), _rotate_cw(q, n))]
            table[dest] = src
    return table


def _compose(first: np.ndarray, second: np.ndarray) -> np.ndarray:
    return first[second]


def _build_move_tables() -> np.ndarray:
    tables = np.empty((18, N_FACELETS), dtype=np.int64)
    for m in MOVES:
        q = _quarter_turn_table(m.face)
        if m.variant == Variant.CW:
            t = q
        elif m.variant == Variant.HALF:
            t = _compose(q, q)
        else:
            t = _compose(_compose(q, q), q)
        tables[m.index] = t
    tables.setflags(write=False)
    return tables


MOVE_TABLES = _build_move_tables()
"""``MOVE_TABLES[m][i]`` is the facelet whose color lands on facelet ``i`` under move ``m``."""

CENTERS = tuple(9 * f + CENTER for f in range(6))
MOVABLE = tuple(i for i in range(N_FACELETS) if i % 9 != CENTER)


def facelet(face: int, pos: int) -> int:
    return 9 * (face - 1) + pos


def moved_facelets(move: Move | int) -> tuple[int, ...]:
    idx = move if isinstance(move, int) else move.index
    t = MOVE_TABLES[idx]
    return tuple(int(i) for i in np.nonzero(t != np.arange(N_FACELETS))[0])


def fixed_facelets(face: Face) -> tuple[int, ...]:
    """Movable facelets left in place by every turn of ``face`` (28 of them)."""
    moved = set(moved_facelets(Move(face, Variant.CW)))
    return tuple(i for i in MOVABLE if i not in moved)


# --- states ---------------------------------------------------------------


class FaceletError(ValueError):
    pass


class FaceletLengthError(FaceletError):
    pass


class FaceletCharError(FaceletError):
    pass


class ColorCountError(FaceletError):
    pass


class CenterError(FaceletError):
    pass


class CubeState:
    """Immutable 54-facelet color assignment."""

    __slots__ = ("_f",)

    def __init__(self, facelets):
        arr = np.array(facelets, dtype=np.uint8).reshape(N_FACELETS)
        arr.setflags(write=False)
        self._f = arr

    @property
    def facelets(self) -> np.ndarray:
        return self._f

    def color(self, face: int, pos: int) -> int:
        return int(self._f[facelet(face, pos)])

    def grid(self) -> np.ndarray:
        return self._f.reshape(6, 9)

    def __eq__(self, other):
        return isinstance(other, CubeState) and bytes(self._f) == bytes(other._f)

    def __hash__(self):
        return hash(bytes(self._f))

    def __repr__(self):
        return f"CubeState({format_facelets(self)!r})"

    def __str__(self):
        return format_facelets(self)


SOLVED = CubeState(np.repeat(np.arange(6), 9))


def solved_state() -> CubeState:
    return SOLVED


def apply_move(state: CubeState, move: Move | int) -> CubeState:
    idx = move if isinstance(move, int) else move.index
    return CubeState(state.facelets[MOVE_TABLES[idx]])


def apply_maneuver(state: CubeState, mv: Iterable[Move]) -> CubeState:
    f = state.facelets
    for m in mv:
        f = f[MOVE_TABLES[m.index]]
    return CubeState(f)


def is_solved(state: CubeState) -> bool:
    return bool(np.array_equal(state.facelets, SOLVED.facelets))


# Facelets the H-state predicate constrains, with the two admissible colors each.
H_CONSTRAINTS: tuple[tuple[int, tuple[int, int]], ...] = tuple(
    [(facelet(f, j), (f - 1, OPPOSITE[f] - 1)) for f in (1, 2, 3, 4) for j in (3, 5)]
    + [(facelet(f, j), (4, 5)) for f in (5, 6) for j in range(9) if j != CENTER]
)


def is_h_state(state: CubeState) -> bool:
    """Facelet test for membership in the subgroup generated by A10.

    Up/down faces show only up/down colors and each middle-layer side facelet
    shows its own face's color or the opposite face's color.
    """
    f = state.facelets
    return all(int(f[i]) in ok for i, ok in H_CONSTRAINTS)


def _cubie_slots() -> list[tuple[int, ...]]:
    by_pos: dict[tuple[int, int, int], list[int]] = {}
    for i, (p, _) in enumerate(_STICKERS):
        by_pos.setdefault(p, []).append(i)
    return [tuple(v) for v in by_pos.values()]


CUBIE_SLOTS = tuple(_cubie_slots())
EDGE_SLOTS = tuple(s for s in CUBIE_SLOTS if len(s) == 2)
CORNER_SLOTS = tuple(s for s in CUBIE_SLOTS if len(s) == 3)
_REAL_CUBIES = sorted(tuple(sorted(int(SOLVED.facelets[i]) for i in s)) for s in CUBIE_SLOTS)


def validate_cubies(state: CubeState) -> bool:
    """True iff every real cubie's color set sits in exactly one slot."""
    f = state.facelets
    got = sorted(tuple(sorted(int(f[i]) for i in s)) for s in CUBIE_SLOTS)
    return got == _REAL_CUBIES


def superflip_state() -> CubeState:
    f = SOLVED.facelets.copy()
    for a, b in EDGE_SLOTS:
        f[a], f[b] = f[b], f[a]
    return CubeState(f)


def parse_facelets(text: str) -> CubeState:
    text = text.strip()
    if len(text) != N_FACELETS:
        raise FaceletLengthError(f"expected 54 facelets, got {len(text)}")
    bad = [ch for ch in text if ch not in FACE_LETTERS]
    if bad:
        raise FaceletCharError(f"illegal facelet character {bad[0]!r} at {text.index(bad[0])}")
    colors = [FACE_LETTERS.index(ch) for ch in text]
    for c in range(6):
        if colors.count(c) != 9:
            raise ColorCountError(f"color {FACE_LETTERS[c]} appears {colors.count(c)} times, expected 9")
    for c, i in enumerate(CENTERS):
        if colors[i] != c:
            raise CenterError(f"center of face {FACE_LETTERS[c]} is {text[i]}")
    return CubeState(colors)


def format_facelets(state: CubeState) -> str:
    return "".join(FACE_LETTERS[c] for c in state.facelets)


def scramble(seed, length: int) -> tuple[Maneuver, CubeState]:
    """Random canonical maneuver of ``length`` moves and the state it produces."""
    rng = random.Random(seed)
    moves: list[Move] = []
    while len(moves) < length:
        m = MOVES[rng.randrange(18)]
        if moves and not may_follow(moves[-1].face, m.face):
            continue
        moves.append(m)
    mv = Maneuver(moves)
    return mv, apply_maneuver(SOLVED, mv)


def is_canonical(mv: Sequence[Move]) -> bool:
    return all(may_follow(a.face, b.face) for a, b in zip(mv, mv[1:]))


# --- brute-force optimal distance ----------------------------------------

MAX_ORACLE_DEPTH = 7


@kernel
def _iddfs(start, tables, follow_ok, goal, max_depth, path):
    """Iterative deepening over canonical sequences; returns depth or -1."""
    n = start.shape[0]
    states = np.empty((max_depth + 1, n), dtype=np.uint8)
    for depth in range(max_depth + 1):
        states[0, :] = start
        lvl = 0
        path[0] = -1
        while lvl >= 0:
            if lvl == depth:
                same = True
                for i in range(n):
                    if states[lvl, i] != goal[i]:
                        same = False
                        break
                if same:
                    return depth
                lvl -= 1
                continue
            # a move fixes at most 20 misplaced facelets
            wrong = 0
            for i in range(n):
                if states[lvl, i] != goal[i]:
                    wrong += 1
            if wrong > 20 * (depth - lvl):
                lvl -= 1
                continue
            m = path[lvl] + 1
            while m < 18:
                if lvl == 0 or follow_ok[path[lvl - 1] // 3, m // 3]:
                    break
                m += 1
            if m >= 18:
                lvl -= 1
                continue
            path[lvl] = m
            t = tables[m]
            for i in range(n):
                states[lvl + 1, i] = states[lvl, t[i]]
            lvl += 1
            if lvl < depth:
                path[lvl] = -1
    return -1


def _bidirectional_bfs(start: np.ndarray, max_depth: int):
    """Meet-in-the-middle breadth-first search over whole layers with numpy."""
    goal = SOLVED.facelets

    def expand(layer: np.ndarray, seen: set):
        children = layer[:, MOVE_TABLES].reshape(-1, N_FACELETS)
        parent = np.repeat(np.arange(len(layer)), 18)
        move = np.tile(np.arange(18), len(layer))
        _, first = np.unique(children, axis=0, return_index=True)
        first.sort()
        keep = [i for i in first if children[i].tobytes() not in seen]
        keep = np.array(keep, dtype=np.int64)
        if len(keep) == 0:
            return children[:0], parent[:0], move[:0]
        return children[keep], parent[keep], move[keep]

    fwd = [(start[None, :].copy(), None, None)]
    bwd = [(goal[None, :].copy(), None, None)]
    seen_f = {start.tobytes()}
    seen_b = {goal.tobytes()}

    def path_back(layers, depth, idx):
        moves = []
        for d in range(depth, 0, -1):
            _, parent, move = layers[d]
            moves.append(int(move[idx]))
            idx = int(parent[idx])
        return moves[::-1]

    for d in range(max_depth + 1):
        a, b = (d + 1) // 2, d // 2
        while len(fwd) <= a:
            layer, parent, move = expand(fwd[-1][0], seen_f)
            seen_f.update(r.tobytes() for r in layer)
            fwd.append((layer, parent, move))
        while len(bwd) <= b:
            layer, parent, move = expand(bwd[-1][0], seen_b)
            seen_b.update(r.tobytes() for r in layer)
            bwd.append((layer, parent, move))
        index_b = {r.tobytes(): i for i, r in enumerate(bwd[b][0])}
        for i, r in enumerate(fwd[a][0]):
            j = index_b.get(r.tobytes())
            if j is not None:
                head = [MOVES[m] for m in path_back(fwd, a, i)]
                tail = [MOVES[m] for m in path_back(bwd, b, j)]
                return d, Maneuver(head) + Maneuver(tail).inverse()
    return None


def optimal_depth_oracle(state: CubeState, max_depth: int) -> tuple[int, Maneuver] | None:
    """Exhaustive face-turn-metric distance, or None beyond ``max_depth``."""
    if not 0 <= max_depth <= MAX_ORACLE_DEPTH:
        raise ValueError(f"max_depth must be within 0..{MAX_ORACLE_DEPTH}, got {max_depth}")
    if USE_NUMBA:
        path = np.full(max(max_depth, 1), -1, dtype=np.int64)
        d = _iddfs(state.facelets, MOVE_TABLES, FOLLOW_OK, SOLVED.facelets, max_depth, path)
        if d < 0:
            return None
        witness = Maneuver(MOVES[int(m)] for m in path[:d])
    else:
        found = _bidirectional_bfs(state.facelets, max_depth)
        if found is None:
            return None
        d, witness = found
    if apply_maneuver(state, witness) != SOLVED:
        raise AssertionError(f"oracle witness {witness} does not solve the state")
    return d, witness
