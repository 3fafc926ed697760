# tests/test_formal_groups.py
from fractions import Fraction

import pytest
import sympy

from errors import BudgetExceeded, ConstructionError
from filtered import check_filtration
from formal_groups import (
    FormalGroupLaw,
    StandardGroup,
    check_p_power_bijection,
    format_fgl_text,
    p_power_decomposition,
    parse_fgl_text,
    read_fgl_file,
    saturation_subgroup,
)
from padic_core import RingSpec

Z3 = RingSpec(p=3, precision_N=6)


def test_multiplicative_p_power_split():
    F = FormalGroupLaw.fixture("multiplicative", Z3)
    dec = p_power_decomposition(F)
    (x,) = dec.variables
    assert sympy.expand(dec.f_p[0] - (3 * x + 3 * x ** 2 + x ** 3)) == 0
    assert dec.phi == (x ** 2,)
    assert dec.psi == (x ** 3,)


def test_additive_p_power_split_is_linear():
    dec = p_power_decomposition(FormalGroupLaw.fixture("additive", Z3))
    assert dec.phi == (0,)
    assert dec.psi == (0,)


def test_truncation_too_low_for_p_power():
    F = FormalGroupLaw.fixture("multiplicative", Z3, degree=2)
    with pytest.raises(BudgetExceeded):
        p_power_decomposition(F)


def test_invalid_law_is_rejected():
    with pytest.raises(ConstructionError, match="F_1"):
        FormalGroupLaw.from_components(Z3, [{(1, 0): 1, (0, 1): 1, (2, 0): 1}])
    with pytest.raises(ValueError):
        FormalGroupLaw.from_components(Z3, [{(1, 0, 0): 1}])


def test_unipotent_law_validates():
    F = FormalGroupLaw.fixture("unipotent2", Z3)
    assert F.n_vars == 2
    assert F.max_degree == 2


def test_standard_group_multiplication():
    G = StandardGroup(FormalGroupLaw.fixture("multiplicative", Z3))
    x = G.point([3])
    assert G.coordinates(G.multiply(x, x)) == (15,)
    assert G.omega(x) == 1
    assert G.is_trivial(G.multiply(x, G.invert(x)))


def test_saturation_subgroup_is_saturated():
    H = saturation_subgroup(FormalGroupLaw.fixture("multiplicative", Z3), samples=20)
    assert H.nu0 == 1
    report = check_filtration(H, samples=15)
    assert report.saturated


def test_p_power_map_is_bijective():
    H = saturation_subgroup(FormalGroupLaw.fixture("multiplicative", RingSpec(p=3, precision_N=8)), samples=10)
    check = check_p_power_bijection(H, Fraction(1))
    assert check.size == 3 ** 6
    assert check.bijective


def test_fgl_text_round_trip(tmp_path):
    F = FormalGroupLaw.fixture("unipotent2", Z3)
    text = format_fgl_text(F)
    assert parse_fgl_text(text) == F
    path = tmp_path / "law.txt"
    path.write_text(text, encoding="utf-8")
    assert read_fgl_file(path).components == F.components


def test_fgl_text_needs_header():
    with pytest.raises(ValueError, match="n_vars"):
        parse_fgl_text("p = 3\ne = 1\neisenstein_poly = -3 1\nD = 4\n0 1 0 1\n")
