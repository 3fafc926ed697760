# tests/test_filtered.py
from fractions import Fraction

import pytest

from filtered import (
    FilteredFreeModule,
    ScaledFiltration,
    check_filtration,
    epsilon_is_injective,
    find_ordered_basis,
    graded_pieces,
    groupring_valuation,
    rescale,
    sat_matches_laurent,
    saturate_filtered_free,
)
from padic_core import RingSpec
from pgroups import MatrixGroupSpec, build_fixture, build_group


def test_cyclic_group_is_saturated():
    report = check_filtration(build_fixture("cyclic3"), samples=20)
    assert report.p_valued
    assert report.saturated
    assert report.failures() == []
    assert report.axioms["7"].status == "holds"


def test_level_two_cyclic_group_fails_root_axiom():
    report = check_filtration(build_fixture("cyclic3-level2"), samples=20)
    assert report.p_valued
    assert report.axioms["6"].status == "fails"
    assert report.axioms["6"].witness
    assert not report.saturated


def test_ramified_bases():
    basis = find_ordered_basis(build_fixture("ramified5"))
    assert basis.valuations == (Fraction(1, 2), Fraction(1))
    assert not basis.equi_p_valued
    weil = find_ordered_basis(build_fixture("ramified5-weil"))
    assert weil.valuations == (Fraction(1), Fraction(1))
    assert weil.equi_p_valued and weil.t == 1


def test_heisenberg_basis_is_equi_p_valued():
    basis = find_ordered_basis(build_fixture("heisenberg3"))
    assert basis.rank == 3
    assert basis.valuations == (Fraction(1),) * 3


def test_one_plus_pR_at_five_only_saturated_for_weil():
    ring = RingSpec(p=5, e=2, eisenstein_poly=(-5, 0, 1), precision_N=8)
    standard = check_filtration(build_group(MatrixGroupSpec(ring, 1, 2, "full", "standard")), samples=20)
    assert standard.axioms["6"].status == "fails"
    weil = check_filtration(build_group(MatrixGroupSpec(ring, 1, 2, "full", "weil")), samples=20)
    assert weil.saturated


def test_ramified_three_is_saturated():
    assert check_filtration(build_fixture("ramified3"), samples=20).saturated


def test_graded_pieces_of_cyclic_group():
    G = build_fixture("cyclic3", precision=6)
    pieces = graded_pieces(G, Fraction(3))
    assert [piece.nu for piece in pieces] == [1, 2, 3]
    assert all(piece.dim == 1 for piece in pieces)
    assert all(epsilon_is_injective(piece, 3) for piece in pieces)


def test_scaled_filtration_shifts_omega():
    G = build_fixture("cyclic3-level2")
    H = ScaledFiltration(G, 1, Fraction(-1))
    x = G.unit_element(0, 2)
    assert G.omega(x) == 2
    assert H.omega(x) == 1
    assert H.nu0 == 1
    assert H.name.endswith("[1ω-1]")
    assert ScaledFiltration(build_fixture("cyclic3"), 1, Fraction(1, 2)).name.endswith("[1ω+1/2]")
    with pytest.raises(ValueError):
        ScaledFiltration(G, 0)


def test_groupring_valuation():
    vals = (Fraction(1, 2), Fraction(1, 2), Fraction(1), Fraction(1))
    assert groupring_valuation((1, 1, 0, 0), vals) == 1
    assert groupring_valuation((0, 0, 2, 1), vals) == 3
    with pytest.raises(ValueError):
        groupring_valuation((1, 0), vals)
    with pytest.raises(ValueError):
        groupring_valuation((-1, 0, 0, 0), vals)


def test_saturation_of_filtered_free_module():
    M = FilteredFreeModule(2, (Fraction(1, 2), Fraction(1)), e=2)
    S = saturate_filtered_free(M)
    assert S.generator_valuations == (0, 0)
    assert S.rescaling == (1, 2)
    back = rescale(S, (1, 2))
    assert back.generator_valuations == M.generator_valuations
    assert M.valuation((0, 0)) == Fraction(1, 2)
    assert M.graded_dimensions(Fraction(1)) == {0: 0, Fraction(1, 2): 1, 1: 2}


def test_laurent_dimensions_over_o_k_are_constant():
    M = FilteredFreeModule(2, (Fraction(1, 2), Fraction(1)), e=2)
    assert M.laurent_dimensions(Fraction(3, 2)) == {0: 2, Fraction(1, 2): 2, 1: 2, Fraction(3, 2): 2}
    assert sat_matches_laurent(M, Fraction(3, 2))


def test_sat_over_z_p_of_ramified_valuations():
    M = FilteredFreeModule(3, (Fraction(1, 2), Fraction(1), Fraction(3, 2)), e=2, step=Fraction(1))
    S = saturate_filtered_free(M)
    assert S.generator_valuations == (Fraction(1, 2), 0, Fraction(1, 2))
    assert S.rescaling == (0, 1, 1)
    laurent = M.laurent_dimensions(Fraction(2))
    assert laurent == {0: 1, Fraction(1, 2): 2, 1: 1, Fraction(3, 2): 2, 2: 1}
    assert S.graded_dimensions(Fraction(2)) == laurent
    assert M.graded_dimensions(Fraction(2)) == {0: 0, Fraction(1, 2): 1, 1: 1, Fraction(3, 2): 2, 2: 1}
    assert sat_matches_laurent(M, Fraction(2))
    assert rescale(S, (0, 1, 1)).generator_valuations == M.generator_valuations
    assert saturate_filtered_free(S).generator_valuations == S.generator_valuations


def test_filtered_free_module_rejects_off_grid_valuations():
    with pytest.raises(ValueError):
        FilteredFreeModule(1, (Fraction(1, 3),), e=2)
    with pytest.raises(ValueError):
        FilteredFreeModule(1, (Fraction(1),), e=2, step=Fraction(1, 3))
