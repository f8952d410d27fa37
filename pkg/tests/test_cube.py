import random

import numpy as np
import pytest

from rubiksat import cube
from rubiksat.cube import Face, Move, Variant, SOLVED

SUPERFLIP_21 = "B F' L' U2 F2 L D' U' F' R' L F2 U2 R2 B2 U R2 D' B2 U' R2"
SUPERFLIP_20 = "BFU2R'D'UL2B2R2B'U2R'L'U'L2U'B2D'L2U'"


def random_state(rng, n=25):
    s = SOLVED
    for _ in range(n):
        s = cube.apply_move(s, rng.randrange(18))
    return s


def test_moves_are_the_18_face_turns():
    assert len(cube.MOVES) == 18
    assert len(set(map(str, cube.MOVES))) == 18
    assert len(cube.A10) == 10


@pytest.mark.parametrize("m", range(18))
def test_every_move_changes_twenty_facelets(m):
    # track sticker identities rather than colors so every displaced facelet counts
    ids = np.arange(54)
    assert int((ids[cube.MOVE_TABLES[m]] != ids).sum()) == 20
    assert len(cube.moved_facelets(m)) == 20


def test_u_mapping_rows():
    after = cube.apply_move(SOLVED, Move(Face.UP, Variant.CW)).facelets
    old = SOLVED.facelets
    # top rows of the side faces cycle front -> left -> back -> right -> front
    for i in range(1, 5):
        g = i % 4 + 1
        for j in range(3):
            assert after[cube.facelet(g, j)] == old[cube.facelet(i, j)]
    # up face turns: corner 0 takes corner 6, edge 1 takes edge 3
    assert after[cube.facelet(5, 0)] == old[cube.facelet(5, 6)]
    up_state = cube.apply_maneuver(SOLVED, cube.parse_maneuver("R U"))
    moved = cube.apply_move(up_state, Move(Face.UP, Variant.CW)).facelets
    assert moved[cube.facelet(5, 1)] == up_state.facelets[cube.facelet(5, 3)]
    assert moved[cube.facelet(5, 0)] == up_state.facelets[cube.facelet(5, 6)]
    # down face untouched
    for j in range(9):
        assert after[cube.facelet(6, j)] == old[cube.facelet(6, j)]


def test_group_laws_on_random_states():
    rng = random.Random(7)
    for _ in range(30):
        s = random_state(rng)
        for m in cube.MOVES:
            if m.variant == Variant.HALF:
                assert cube.apply_maneuver(s, [m, m]) == s
            else:
                assert cube.apply_maneuver(s, [m] * 4) == s
                half = Move(m.face, Variant.HALF)
                assert cube.apply_maneuver(s, [m, m]) == cube.apply_move(s, half)
            assert cube.apply_maneuver(s, [m, m.inverse]) == s


def test_color_conservation_and_fixed_centers():
    rng = random.Random(3)
    s = random_state(rng, 40)
    assert sorted(s.facelets.tolist()) == sorted(SOLVED.facelets.tolist())
    for c, i in enumerate(cube.CENTERS):
        assert s.facelets[i] == c


def test_apply_move_does_not_modify_input():
    before = SOLVED.facelets.copy()
    cube.apply_move(SOLVED, 0)
    assert np.array_equal(SOLVED.facelets, before)


def test_maneuver_identities():
    assert cube.apply_maneuver(SOLVED, cube.parse_maneuver("U U'")) == SOLVED
    assert cube.apply_maneuver(SOLVED, cube.parse_maneuver("U2 U2")) == SOLVED
    assert cube.apply_maneuver(SOLVED, cube.Maneuver()) == SOLVED


def test_superflip_maneuvers_solve():
    sf = cube.superflip_state()
    mv21 = cube.parse_maneuver(SUPERFLIP_21)
    mv20 = cube.parse_maneuver(SUPERFLIP_20)
    assert (len(mv21), len(mv20)) == (21, 20)
    assert cube.is_solved(cube.apply_maneuver(sf, mv21)), "move convention is wrong"
    assert cube.is_solved(cube.apply_maneuver(sf, mv20)), "move convention is wrong"


def test_superflip_properties():
    sf = cube.superflip_state()
    assert not cube.is_solved(sf)
    assert not cube.is_h_state(sf)
    assert cube.validate_cubies(sf)
    diff = np.flatnonzero(sf.facelets != SOLVED.facelets)
    assert len(diff) == 24
    assert all(i in {a for e in cube.EDGE_SLOTS for a in e} for i in diff)


@pytest.mark.parametrize("text,expected", [("U", "U'"), ("F2", "F2"), ("R U2 D'", "D U2 R'")])
def test_inverse(text, expected):
    assert str(cube.inverse(cube.parse_maneuver(text))) == expected


def test_inverse_undoes():
    rng = random.Random(11)
    for seed in range(10):
        mv, s = cube.scramble(seed, 12)
        t = random_state(rng)
        assert cube.apply_maneuver(cube.apply_maneuver(t, mv), mv.inverse()) == t


def test_is_solved_and_h_state():
    assert cube.is_solved(SOLVED)
    assert not cube.is_solved(cube.apply_move(SOLVED, Move(Face.UP, Variant.CW)))
    assert cube.is_h_state(SOLVED)
    assert cube.is_h_state(cube.apply_move(SOLVED, Move(Face.UP, Variant.CW)))
    assert not cube.is_h_state(cube.apply_move(SOLVED, Move(Face.FRONT, Variant.CW)))


def test_h_closure_and_up_down_confinement():
    rng = random.Random(5)
    a10 = sorted(cube.A10, key=lambda m: m.index)
    s = SOLVED
    for _ in range(200):
        s = cube.apply_move(s, rng.choice(a10))
        assert cube.is_h_state(s)
        ud = s.facelets[36:]
        assert set(ud.tolist()) <= {4, 5}


def test_parse_maneuver():
    assert cube.parse_maneuver("U") == (Move(Face.UP, Variant.CW),)
    assert str(cube.parse_maneuver("F2U2B'")) == "F2 U2 B'"
    assert str(cube.parse_maneuver("R′ L’")) == "R' L'"
    with pytest.raises(cube.ManeuverParseError) as ei:
        cube.parse_maneuver("X2")
    assert ei.value.token == 1
    with pytest.raises(cube.ManeuverParseError) as ei:
        cube.parse_maneuver("U R Q")
    assert ei.value.token == 3


def test_maneuver_round_trip():
    for seed in range(20):
        mv, _ = cube.scramble(seed, 15)
        assert cube.parse_maneuver(str(mv)) == mv
        assert cube.parse_maneuver(str(mv).replace(" ", "")) == mv


def test_facelet_round_trip_and_solved_string():
    text = "".join(ch * 9 for ch in "FLBRUD")
    assert cube.parse_facelets(text) == SOLVED
    for seed in range(10):
        _, s = cube.scramble(seed, 10)
        assert cube.parse_facelets(cube.format_facelets(s)) == s


def test_format_after_u_differs_in_twenty_places():
    a = cube.format_facelets(SOLVED)
    b = cube.format_facelets(cube.apply_move(SOLVED, Move(Face.UP, Variant.CW)))
    assert sum(x != y for x, y in zip(a, b)) == 12  # face-5 stickers keep their color on solved
    changed = set(cube.moved_facelets(Move(Face.UP, Variant.CW)))
    assert {i for i in range(54) if a[i] != b[i]} <= changed


@pytest.mark.parametrize("text,err", [
    ("F" * 53, cube.FaceletLengthError),
    ("X" + "".join(ch * 9 for ch in "FLBRUD")[1:], cube.FaceletCharError),
    ("FFFFFFFFFFLL" + "".join(ch * 9 for ch in "FLBRUD")[12:], cube.ColorCountError),
])
def test_facelet_errors(text, err):
    with pytest.raises(err):
        cube.parse_facelets(text)


def test_center_error():
    chars = list("".join(ch * 9 for ch in "FLBRUD"))
    chars[4], chars[13] = chars[13], chars[4]
    with pytest.raises(cube.CenterError):
        cube.parse_facelets("".join(chars))


def test_validate_cubies():
    assert cube.validate_cubies(SOLVED)
    for seed in range(10):
        assert cube.validate_cubies(cube.scramble(seed, 20)[1])
    f = SOLVED.facelets.copy()
    f[cube.facelet(1, 0)], f[cube.facelet(5, 0)] = f[cube.facelet(5, 0)], f[cube.facelet(1, 0)]
    assert not cube.validate_cubies(cube.CubeState(f))


def test_scramble_contract():
    assert cube.scramble(3, 0) == (cube.Maneuver(), SOLVED)
    assert cube.scramble(42, 10) == cube.scramble(42, 10)
    for seed in range(50):
        mv, s = cube.scramble(seed, 10)
        assert len(mv) == 10 and cube.is_canonical(mv)
        text = str(mv).split()
        for a, b in zip(text, text[1:]):
            assert (a[0], b[0]) not in {("D", "U"), ("R", "L"), ("B", "F")}
            assert a[0] != b[0]
        assert cube.apply_maneuver(SOLVED, mv) == s


def test_oracle_basics():
    assert cube.optimal_depth_oracle(SOLVED, 3) == (0, cube.Maneuver())
    d, w = cube.optimal_depth_oracle(cube.apply_maneuver(SOLVED, cube.parse_maneuver("U2")), 3)
    assert d == 1 and str(w) == "U2"
    s = cube.apply_maneuver(SOLVED, cube.parse_maneuver("R U R' U'"))
    d, w = cube.optimal_depth_oracle(s, 5)
    assert d == 4 and cube.is_solved(cube.apply_maneuver(s, w))
    assert cube.optimal_depth_oracle(s, 3) is None
    with pytest.raises(ValueError):
        cube.optimal_depth_oracle(SOLVED, 8)


def test_oracle_consistency_with_scrambles():
    for seed in range(10):
        mv, s = cube.scramble(seed, 1 + seed % 5)
        d, w = cube.optimal_depth_oracle(s, 5)
        assert d <= len(mv) and len(w) == d
        assert cube.is_solved(cube.apply_maneuver(s, w))
