"""Compile a bounded-length cube solving problem to CNF.

States are numbered 1..n and the move at step t turns state t into state t+1.
Every movable facelet carries a small bit-vector color code per state; centers
never move and are folded in as constants.  Each step has six move-type
variables (u d l r f b) and eighteen move variables; frame clauses are shared
per type and only the moved facelets are tied to individual moves.
"""
from __future__ import annotations

import itertools
from dataclasses import asdict, dataclass, field, fields
from typing import Mapping, Sequence

import numpy as np

from . import cube
from .cnf import Formula, encode_amo, encode_conditional_exactly_one, encode_exactly_one
from .cube import (
    A10,
    H_CONSTRAINTS,
    MOVABLE,
    MOVE_TABLES,
    MOVES,
    SOLVED,
    TYPE_FACES,
    CubeState,
    Face,
    Maneuver,
    Move,
    Variant,
)

MOVE_TYPE_TAG = "move-type-EO"
_MOVED = tuple(cube.moved_facelets(m) for m in MOVES)
_FIXED = tuple(cube.fixed_facelets(f) for f in TYPE_FACES)
_H_ADMISSIBLE = dict(H_CONSTRAINTS)
_SOLVED_COLOR = SOLVED.facelets


class ConfigError(ValueError):
    pass


class DecodeError(RuntimeError):
    def __init__(self, step: int, msg: str):
        super().__init__(f"step {step}: {msg}")
        self.step = step


@dataclass(frozen=True)
class EncodingConfig:
    n_states: int
    mode: str = "exact"  # exact | atmost
    phase1_len: int | None = None
    color_bits: int = 3  # 3 everywhere, or 2 for the phase-two states
    pruning_opposite: bool = True
    pruning_same_face: bool = False
    last_move_constraint: bool | None = None  # None: on in exact mode
    amo_method: str = "pairwise"
    frame_split: bool = True

    def __post_init__(self):
        if self.last_move_constraint is None:
            object.__setattr__(self, "last_move_constraint", self.mode == "exact")
        self.validate()

    def validate(self) -> None:
        if self.n_states < 1:
            raise ConfigError("n_states must be >= 1")
        if self.mode not in ("exact", "atmost"):
            raise ConfigError(f"mode must be exact or atmost, got {self.mode!r}")
        if self.color_bits not in (2, 3):
            raise ConfigError("color_bits must be 3 or 2")
        if self.amo_method not in ("pairwise", "product"):
            raise ConfigError(f"unknown amo_method {self.amo_method!r}")
        k = self.phase1_len
        if k is not None and not 0 <= k < self.n_states - 1:
            raise ConfigError(f"phase1_len must be within 0..{self.n_states - 2}, got {k}")
        if self.color_bits == 2 and k is None:
            raise ConfigError("2-bit colors need phase1_len")
        if self.last_move_constraint and self.mode != "exact":
            raise ConfigError("last_move_constraint requires exact mode")

    @property
    def n_steps(self) -> int:
        return self.n_states - 1

    def bits(self, t: int) -> int:
        if self.color_bits == 2 and t >= self.phase1_len + 2:
            return 2
        return 3

    def to_text(self) -> str:
        return "".join(f"{k}={v}\n" for k, v in asdict(self).items())

    @classmethod
    def from_text(cls, text: str) -> "EncodingConfig":
        types = {f.name: f.type for f in fields(cls)}
        kw = {}
        for line in text.splitlines():
            if not line.strip():
                continue
            key, _, raw = line.partition("=")
            key, raw = key.strip(), raw.strip()
            if key not in types:
                raise ConfigError(f"unknown config key {key!r}")
            if raw == "None":
                kw[key] = None
            elif raw in ("True", "False"):
                kw[key] = raw == "True"
            elif raw.lstrip("-").isdigit():
                kw[key] = int(raw)
            else:
                kw[key] = raw
        return cls(**kw)


def color_code(color: int, scheme: int = 3) -> tuple[int, ...]:
    """Bit code of a color, most significant bit first.

    In the 2-bit scheme the four side colors are 00 01 10 11 and the up/down
    colors reuse 00 and 01; this is only unambiguous for phase-two states.
    """
    if scheme == 3:
        return ((color >> 2) & 1, (color >> 1) & 1, color & 1)
    code = color if color < 4 else color - 4
    return ((code >> 1) & 1, code & 1)


@dataclass
class VarMap:
    config: EncodingConfig
    initial: CubeState
    color: dict[tuple[int, int], tuple[int, ...]] = field(default_factory=dict)
    types: dict[tuple[int, int], int] = field(default_factory=dict)
    moves: dict[tuple[int, int], int] = field(default_factory=dict)
    solved: dict[int, int] = field(default_factory=dict)

    def facelet_lits(self, t: int, i: int, color: int) -> list[int]:
        """Literals asserting facelet ``i`` has ``color`` in state ``t``."""
        vs = self.color[t, i]
        code = color_code(color, len(vs))
        return [v if b else -v for v, b in zip(vs, code)]

    def move_var(self, step: int, move: Move | int) -> int:
        idx = move if isinstance(move, int) else move.index
        return self.moves[step, idx]

    def type_var(self, step: int, face_or_type: Face | int) -> int:
        idx = TYPE_FACES.index(face_or_type) if isinstance(face_or_type, Face) else face_or_type
        return self.types[step, idx]

    def type_vars(self, step: int) -> list[int]:
        return [self.types[step, j] for j in range(6)]


def _facelet_name(i: int) -> str:
    f, j = divmod(i, 9)
    return f"{f + 1},{j}"


class _Builder:
    def __init__(self, state: CubeState, config: EncodingConfig):
        self.f = Formula()
        self.vm = VarMap(config, state)
        self.cfg = config

    # -- variables --
    def allocate(self) -> None:
        cfg, f, vm = self.cfg, self.f, self.vm
        for t in range(1, cfg.n_states + 1):
            nb = cfg.bits(t)
            for i in MOVABLE:
                vm.color[t, i] = tuple(f.new_var(f"c({_facelet_name(i)},{t},{b + 1})") for b in range(nb))
        for t in range(1, cfg.n_states):
            for j, name in enumerate(cube.TYPE_NAMES):
                vm.types[t, j] = f.new_var(f"{name}_{t}")
            for m in MOVES:
                vm.moves[t, m.index] = f.new_var(f"{m}_{t}")
        if cfg.mode == "atmost":
            for t in range(1, cfg.n_states + 1):
                vm.solved[t] = f.new_var(f"s_{t}")

    # -- helpers --
    def equal_vectors(self, guard: int, a: Sequence[int], b: Sequence[int]) -> None:
        for x, y in zip(a, b):
            self.f.add_clause((-guard, -x, y))
            self.f.add_clause((-guard, x, -y))

    def encode_facelet_equals_constant(self, t: int, i: int, color: int, guard: int | None = None) -> None:
        for lit in self.vm.facelet_lits(t, i, color):
            self.f.add_clause((lit,) if guard is None else (-guard, lit))

    def encode_facelet_in_pair(self, t: int, i: int, colors: tuple[int, int], guard: int | None = None) -> None:
        """facelet == A or facelet == B, distributed into clauses without auxiliaries."""
        a = self.vm.facelet_lits(t, i, colors[0])
        b = self.vm.facelet_lits(t, i, colors[1])
        out: list[frozenset[int]] = []
        for x, y in itertools.product(a, b):
            if x == -y:
                continue
            c = frozenset((x, y))
            if c not in out:
                out.append(c)
        # drop clauses subsumed by smaller ones
        kept = [c for c in out if not any(o < c for o in out)]
        for c in kept:
            lits = sorted(c, key=lambda v: (abs(v), v))
            self.f.add_clause(lits if guard is None else [-guard, *lits])

    # -- blocks --
    def encode_initial_state(self) -> None:
        colors = self.vm.initial.facelets
        for i in MOVABLE:
            self.encode_facelet_equals_constant(1, i, int(colors[i]))

    def encode_move_selection(self, t: int) -> None:
        vm, f = self.vm, self.f
        types = vm.type_vars(t)
        encode_exactly_one(f, types, self.cfg.amo_method, tag=(MOVE_TYPE_TAG, t), name=f"type_{t}")
        for j in range(6):
            variants = [vm.moves[t, 3 * j + v] for v in range(3)]
            encode_conditional_exactly_one(f, types[j], variants)
        for m in MOVES:
            f.add_clause((-vm.moves[t, m.index], types[m.type_index]))

    def _allowed(self, t: int, m: Move) -> bool:
        # Side quarter turns are forced false in phase two.  Their transition
        # clauses are still emitted in 3-bit states, but would mix the two
        # color schemes once 2-bit states are involved.
        return self.cfg.bits(t + 1) == 3 or m in A10

    def encode_move_semantics(self, t: int) -> None:
        vm, cfg = self.vm, self.cfg
        if cfg.bits(t) != cfg.bits(t + 1):
            self._encode_channel_step(t)
            return
        if cfg.frame_split:
            for j in range(6):
                g = vm.types[t, j]
                for i in _FIXED[j]:
                    self.equal_vectors(g, vm.color[t + 1, i], vm.color[t, i])
        for m in MOVES:
            if not self._allowed(t, m):
                continue
            g = vm.moves[t, m.index]
            table = MOVE_TABLES[m.index]
            targets = _MOVED[m.index] if cfg.frame_split else MOVABLE
            for i in targets:
                self.equal_vectors(g, vm.color[t + 1, i], vm.color[t, int(table[i])])

    def _encode_channel_step(self, t: int) -> None:
        """Step from the last 3-bit state into the first 2-bit state.

        The source state is an H-state, so up/down facelets carry one of two
        colors and side facelets one of four; one guarded implication per
        possible source color writes its 2-bit projection.
        """
        vm = self.vm

        def channel(guard: int, dest: int, src: int) -> None:
            palette = (4, 5) if src >= 36 else (0, 1, 2, 3)
            for c in palette:
                premise = [-x for x in vm.facelet_lits(t, src, c)]
                for lit in vm.facelet_lits(t + 1, dest, c):
                    self.f.add_clause((-guard, *premise, lit))

        if self.cfg.frame_split:
            for j in range(6):
                for i in _FIXED[j]:
                    channel(vm.types[t, j], i, i)
        for m in MOVES:
            if not self._allowed(t, m):
                continue
            table = MOVE_TABLES[m.index]
            targets = _MOVED[m.index] if self.cfg.frame_split else MOVABLE
            for i in targets:
                channel(vm.moves[t, m.index], i, int(table[i]))

    def encode_pruning(self, t: int) -> None:
        vm, f = self.vm, self.f
        if self.cfg.pruning_opposite:
            for a, b in ((Face.DOWN, Face.UP), (Face.RIGHT, Face.LEFT), (Face.BACK, Face.FRONT)):
                f.add_clause((-vm.type_var(t, a), -vm.type_var(t + 1, b)))
        if self.cfg.pruning_same_face:
            for j in range(6):
                f.add_clause((-vm.types[t, j], -vm.types[t + 1, j]))

    def encode_solved_target(self) -> None:
        cfg, vm = self.cfg, self.vm
        if cfg.mode == "exact":
            for i in MOVABLE:
                self.encode_facelet_equals_constant(cfg.n_states, i, int(_SOLVED_COLOR[i]))
            return
        for t in range(1, cfg.n_states + 1):
            for i in MOVABLE:
                self.encode_facelet_equals_constant(t, i, int(_SOLVED_COLOR[i]), guard=vm.solved[t])
        flags = [vm.solved[t] for t in range(1, cfg.n_states + 1)]
        encode_exactly_one(self.f, flags, cfg.amo_method, name="solved")

    def encode_phase_constraints(self) -> None:
        k = self.cfg.phase1_len
        h = k + 1
        for i, pair in H_CONSTRAINTS:
            self.encode_facelet_in_pair(h, i, pair)
        for t in range(k + 1, self.cfg.n_states):
            for m in MOVES:
                if m not in A10:
                    self.f.add_clause((-self.vm.moves[t, m.index],))

    def encode_last_move_constraint(self) -> None:
        cfg, vm = self.cfg, self.vm
        if cfg.n_steps >= 1:
            t = cfg.n_steps
            for j in range(6):
                for i in _FIXED[j]:
                    self.encode_facelet_equals_constant(t, i, int(_SOLVED_COLOR[i]), guard=vm.types[t, j])
        k = cfg.phase1_len
        if k is not None and k >= 1:
            # the last phase-one turn leaves its 28 facelets already H-admissible
            for j in range(6):
                for i in _FIXED[j]:
                    if i in _H_ADMISSIBLE:
                        self.encode_facelet_in_pair(k, i, _H_ADMISSIBLE[i], guard=vm.types[k, j])

    def build_transitions(self) -> None:
        cfg = self.cfg
        self.allocate()
        self.encode_initial_state()
        for t in range(1, cfg.n_states):
            self.encode_move_selection(t)
            self.encode_move_semantics(t)
            if t + 1 < cfg.n_states:
                self.encode_pruning(t)

    def build(self) -> tuple[Formula, VarMap]:
        cfg = self.cfg
        self.build_transitions()
        self.encode_solved_target()
        if cfg.phase1_len is not None:
            self.encode_phase_constraints()
        if cfg.last_move_constraint:
            self.encode_last_move_constraint()
        return self.f, self.vm


def encode(state: CubeState, config: EncodingConfig) -> tuple[Formula, VarMap]:
    config.validate()
    if not cube.validate_cubies(state):
        raise ConfigError("initial state is not a physical cube state")
    return _Builder(state, config).build()


def encode_transitions(state: CubeState, config: EncodingConfig) -> tuple[Formula, VarMap]:
    """Initial state and move steps only: no solved target, phase or last-move blocks."""
    config.validate()
    b = _Builder(state, config)
    b.build_transitions()
    return b.f, b.vm


def _value(model, v: int) -> bool:
    if isinstance(model, Mapping):
        return bool(model[v])
    return bool(model[v])


def check_model(formula: Formula, model) -> int | None:
    """Index of the first clause the model falsifies, or None."""
    for ci, c in enumerate(formula.clauses):
        if not any(_value(model, abs(x)) == (x > 0) for x in c):
            return ci
    return None


def decode_solution(model, varmap: VarMap, formula: Formula | None = None) -> tuple[Maneuver, int]:
    """Read the maneuver out of a model and verify it on the cube model.

    Returns the maneuver (truncated at the solved state) and the index of the
    solved state.
    """
    cfg = varmap.config
    if formula is not None:
        bad = check_model(formula, model)
        if bad is not None:
            raise DecodeError(0, f"model falsifies clause {bad}: {formula.clauses[bad]}")
    moves = []
    for t in range(1, cfg.n_states):
        on = [m for m in MOVES if _value(model, varmap.moves[t, m.index])]
        if len(on) != 1:
            raise DecodeError(t, f"expected one move variable true, found {[str(m) for m in on]}")
        moves.append(on[0])
    if cfg.mode == "exact":
        solve_step = cfg.n_states
    else:
        on = [t for t in range(1, cfg.n_states + 1) if _value(model, varmap.solved[t])]
        if len(on) != 1:
            raise DecodeError(0, f"expected one solved flag, found {on}")
        solve_step = on[0]
    mv = Maneuver(moves[: solve_step - 1])
    if not cube.is_solved(cube.apply_maneuver(varmap.initial, mv)):
        raise DecodeError(solve_step - 1, f"decoded maneuver {mv} does not solve the initial state")
    return mv, solve_step


def decode_states(model, varmap: VarMap) -> list[np.ndarray | None]:
    """Per-state facelet colors read from 3-bit variables (None for 2-bit states)."""
    out: list[np.ndarray | None] = []
    for t in range(1, varmap.config.n_states + 1):
        if varmap.config.bits(t) != 3:
            out.append(None)
            continue
        arr = SOLVED.facelets.copy()
        for i in MOVABLE:
            bits = [_value(model, v) for v in varmap.color[t, i]]
            arr[i] = bits[0] * 4 + bits[1] * 2 + bits[2]
        out.append(arr)
    return out
