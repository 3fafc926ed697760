# tests/test_lazmap.py
import random

import pytest
import sympy

from errors import BudgetExceeded
from lazmap import (
    AnalyticCochain,
    Chart,
    analytic_cup,
    bar_differential_analytic,
    chain_map_check,
    chart_symbols,
    constant_cochain,
    coordinate_cochain,
    cup_compatible,
    format_cochain_text,
    heisenberg_cocycle,
    lazard_phi,
    log_coordinate_cochain,
    parse_cochain_text,
    permute_arguments,
    phi_report,
    random_cochain,
    read_cochain_file,
)
from pgroups import build_fixture


@pytest.fixture(scope="module")
def heisenberg_chart():
    return Chart(build_fixture("heisenberg3"))


@pytest.fixture(scope="module")
def torus_chart():
    return Chart(build_fixture("torus3"))


def test_chart_lattice_of_heisenberg(heisenberg_chart):
    L = heisenberg_chart.lattice
    assert L.constants == (((0, 2, 1), 3),)
    assert L.valuations == (1, 1, 1)
    assert heisenberg_chart.base == (1, 1, 1)


def test_chart_product_matches_group(heisenberg_chart):
    G = heisenberg_chart.G
    x = heisenberg_chart.element([1, 2, 0])
    y = heisenberg_chart.element([0, 1, 1])
    assert heisenberg_chart.product([1, 2, 0], [0, 1, 1]) == [1, 6, 1]
    assert heisenberg_chart.point(G.multiply(x, y)) == [1, 6, 1]


def test_torus_chart_is_not_additive(torus_chart):
    u, v = sympy.symbols("u v")
    assert sympy.expand(torus_chart.product([u, 0], [v, 0])[0] - (u + v + 3 * u * v)) == 0
    assert torus_chart.lattice.is_abelian()


def test_point_rejects_non_members(heisenberg_chart):
    G = heisenberg_chart.G
    with pytest.raises(ValueError):
        heisenberg_chart.point(G.from_coordinates([1, 0, 0]))


def test_constant_cochain_is_a_cocycle(heisenberg_chart):
    assert bar_differential_analytic(constant_cochain(3, 5), heisenberg_chart).is_zero()


def test_log_coordinates_are_cocycles_on_abelian_groups(torus_chart):
    for j in range(2):
        f = log_coordinate_cochain(torus_chart, j, degree=4)
        assert bar_differential_analytic(f, torus_chart).is_zero()
    # the raw chart coordinate is not a homomorphism here
    assert not bar_differential_analytic(coordinate_cochain(2, 0), torus_chart).is_zero()


def test_phi_of_coordinate_is_dual_vector():
    phi = lazard_phi(coordinate_cochain(3, 1))
    assert phi.values == (0, 1, 0)
    assert phi.is_integral()


def test_heisenberg_cocycle_report(heisenberg_chart):
    f = heisenberg_cocycle()
    assert f.is_normalized()
    assert f.evaluate([[1, 2, 3], [4, 5, 6]]) == 6
    report = phi_report(heisenberg_chart, f)
    assert report.bar_cocycle
    assert report.phi.support() == {(0, 2): 1}
    assert report.d_phi.is_zero()
    assert report.nonzero_mod_p is True


def test_swapping_arguments_flips_phi():
    f = heisenberg_cocycle()
    g = permute_arguments(f, (1, 0))
    assert lazard_phi(g).values == tuple(-v for v in lazard_phi(f).values)
    with pytest.raises(ValueError):
        permute_arguments(f, (0, 0))


def test_chain_map_on_heisenberg(heisenberg_chart):
    verdict = chain_map_check(heisenberg_chart, samples=6, seed=11, cochains=[heisenberg_cocycle()])
    assert verdict.holds
    assert verdict.samples == 7


def test_chain_map_on_torus(torus_chart):
    assert chain_map_check(torus_chart, samples=6, seed=5).holds


@pytest.mark.slow
def test_chain_map_on_gl2():
    assert chain_map_check(Chart(build_fixture("gl2-3")), samples=10, seed=2).holds


def test_cup_compatibility(heisenberg_chart):
    assert cup_compatible(heisenberg_chart, coordinate_cochain(3, 0), coordinate_cochain(3, 2))
    rng = random.Random(4)
    f = random_cochain(3, 1, 2, rng)
    g = random_cochain(3, 1, 2, rng)
    assert cup_compatible(heisenberg_chart, f, g)
    assert analytic_cup(f, g).arity == 2


def test_truncation_degree_too_small(heisenberg_chart):
    f = AnalyticCochain(2, 3, chart_symbols(2, 3)[0][0] * chart_symbols(2, 3)[1][2], 2)
    with pytest.raises(BudgetExceeded):
        bar_differential_analytic(f, heisenberg_chart)


def test_bar_differential_squares_to_zero(heisenberg_chart):
    rng = random.Random(8)
    f = random_cochain(3, 1, 4, rng)
    ddf = bar_differential_analytic(bar_differential_analytic(f, heisenberg_chart), heisenberg_chart)
    assert ddf.is_zero()


def test_invalid_cochains():
    with pytest.raises(ValueError):
        AnalyticCochain(1, 2, sympy.Symbol("t1_0"), 2)
    with pytest.raises(ValueError):
        random_cochain(3, 3, 2, random.Random(0))


def test_cochain_text_round_trip(tmp_path):
    f = heisenberg_cocycle()
    text = format_cochain_text(f)
    assert text.splitlines()[:3] == ["arity 2", "vars 3", "degree 3"]
    assert parse_cochain_text(text) == f
    path = tmp_path / "c.txt"
    path.write_text("# comment\n" + text, encoding="utf-8")
    assert read_cochain_file(path) == f


def test_cochain_text_errors():
    with pytest.raises(ValueError, match="vars"):
        parse_cochain_text("arity 1\n1 1 0\n")
    with pytest.raises(ValueError, match="fields"):
        parse_cochain_text("arity 1\nvars 2\n1 1\n")
    with pytest.raises(FileNotFoundError):
        read_cochain_file("missing-cochain.txt")
