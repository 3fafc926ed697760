# tests/test_lazard_lie.py
from fractions import Fraction

import numpy as np
import pytest

from errors import ConstructionError, HypothesisFailure
from lazard_lie import (
    AdjointAction,
    DeterminantAction,
    LieLattice,
    LieModule,
    adjoint_module,
    check_lattice_identity,
    exp_log_roundtrip,
    format_lattice_text,
    graded_ranks_agree,
    induced_module,
    lattice_fixture,
    lazard_lie,
    load_lattice,
    parse_lattice_text,
    quaternion_lattice,
)
from pgroups import build_fixture


def test_constants_are_normalized():
    L = LieLattice(3, (((2, 0, 1), 5), ((0, 2, 1), -2), ((1, 2, 0), 0)))
    assert L.constants == (((0, 2, 1), -7),)
    assert L.bracket([0, 0, 1], [1, 0, 0]) == [0, 7, 0]
    assert L.ad(0)[1, 2] == -7


def test_diagonal_bracket_must_vanish():
    with pytest.raises(ValueError, match="must vanish"):
        LieLattice(2, (((1, 1, 0), 1),))
    with pytest.raises(ValueError, match="out of range"):
        LieLattice(2, (((0, 2, 0), 1),))


def test_modulus_drops_vanishing_constants():
    L = LieLattice(2, (((0, 1, 0), 9), ((0, 1, 1), 10)), modulus=9)
    assert L.constants == (((0, 1, 1), 1),)
    assert L.p == 3
    with pytest.raises(ValueError):
        LieLattice(2, (), modulus=12)


def test_quaternion_fixture_matches_construction():
    fixture, built = lattice_fixture("quaternion5"), quaternion_lattice(5)
    assert fixture.constants == built.constants
    assert fixture.valuations == built.valuations == (Fraction(1, 2), Fraction(1, 2), 1, 1)
    fixture.check_jacobi()


def test_jacobi_defect_is_reported():
    L = LieLattice(3, (((0, 1, 1), 1), ((0, 2, 2), 1), ((1, 2, 0), 1)))
    assert L.jacobi_defects() == [(0, 1, 2)]
    with pytest.raises(ConstructionError):
        L.check_jacobi()


def test_lattice_text_round_trip(tmp_path):
    L = lattice_fixture("heisenberg3")
    text = format_lattice_text(L)
    back = parse_lattice_text(text)
    assert (back.rank, back.constants, back.valuations, back.p, back.modulus) == \
        (L.rank, L.constants, L.valuations, L.p, L.modulus)
    path = tmp_path / "h.lat"
    path.write_text(text, encoding="utf-8")
    assert load_lattice(str(path)).constants == L.constants
    assert load_lattice("Heisenberg3").constants == L.constants


def test_lattice_text_rejects_bad_lines():
    with pytest.raises(ValueError):
        parse_lattice_text("3\n1 2 3\n")
    with pytest.raises(ValueError):
        parse_lattice_text("")
    with pytest.raises(FileNotFoundError):
        load_lattice("no/such/lattice.txt")


def test_heisenberg_log_lattice():
    G = build_fixture("heisenberg3")
    L = lazard_lie(G)
    assert L.rank == 3
    assert L.constants == (((0, 2, 1), 3),)
    assert L.valuations == (1, 1, 1)
    assert graded_ranks_agree(G, L)
    assert exp_log_roundtrip(G, L)


def test_ramified_log_lattice_is_abelian():
    L = lazard_lie(build_fixture("ramified5"))
    assert L.is_abelian()
    assert L.valuations == (Fraction(1, 2), 1)


@pytest.mark.parametrize("name", ["cyclic3", "gl2-3"])
def test_lattice_identity(name):
    G = build_fixture(name, precision=5)
    verdict = check_lattice_identity(G)
    assert verdict.holds
    assert verdict.level == 1


def test_lattice_identity_at_two(allow_p2):
    G = build_fixture("z2-level2", precision=5)
    verdict = check_lattice_identity(G)
    assert verdict.holds
    assert verdict.level == 2
    assert verdict.detail == "log lattice = 4·Lie"


def test_lattice_identity_needs_unramified_group():
    with pytest.raises(ValueError):
        check_lattice_identity(build_fixture("ramified5"))


def test_trivial_module():
    M = LieModule.trivial(3, 9, rank=2)
    assert M.is_trivial()
    M.check_bracket(lattice_fixture("heisenberg3"))
    with pytest.raises(ValueError):
        M.check_bracket(LieLattice(2))


def test_adjoint_module_of_gl2():
    G = build_fixture("gl2-3")
    L = lazard_lie(G)
    M = adjoint_module(G, L, 1)
    assert M.rank == 4
    assert M.modulus == 3
    # brackets of the log frame are divisible by 3
    assert M.is_trivial()


def test_adjoint_action_is_identity_on_center():
    G = build_fixture("gl2-3")
    L = lazard_lie(G)
    rho = AdjointAction(G, L, 2)
    scalar = G.element([[4, 0], [0, 4]])
    assert (rho(scalar) == np.eye(4, dtype=object)).all()


def test_induced_module_rejects_image_outside_congruence():
    G = build_fixture("cyclic3")
    L = lazard_lie(G)
    with pytest.raises(HypothesisFailure):
        induced_module(G, [[[2]]], L, 1)


def test_determinant_action():
    G = build_fixture("gl2-3")
    x = G.element([[4, 0], [0, 1]])
    assert DeterminantAction(G, 2)(x)[0, 0] == 4
    assert DeterminantAction(G, 2, power=2)(x)[0, 0] == 16 % 9
