# tests/test_group_cohom.py
import logging

import numpy as np
import pytest

import config
from errors import BudgetExceeded, HypothesisFailure
from group_cohom import (
    D_SQUARED_AUTO_CELLS,
    BarComplex,
    Coefficients,
    Inflation,
    continuous_cohomology,
    group_cup,
    is_coboundary,
    level_cohomology,
)
from lazard_lie import DeterminantAction
from pgroups import FiniteQuotient, build_fixture


@pytest.fixture(scope="module")
def torus_bar():
    Q = FiniteQuotient(build_fixture("torus3"), 2)
    return BarComplex(Q, Coefficients.trivial(3), 3)


def test_cyclic_group_of_order_three():
    Q = FiniteQuotient(build_fixture("cyclic3"), 2)
    assert Q.order == 3
    B = BarComplex(Q, Coefficients.trivial(3), 5)
    for n in range(5):
        assert level_cohomology(B, n) == [3]


def test_elementary_abelian_level(torus_bar):
    dims = [len(level_cohomology(torus_bar, n)) for n in range(3)]
    assert dims == [1, 2, 3]


def test_differential_squares_to_zero(torus_bar):
    torus_bar.check_d_squared(1, samples=4, seed=3)
    f = torus_bar.random_cochains(1, 1, seed=5)
    assert is_coboundary(torus_bar, 2, torus_bar.apply(1, f))
    assert torus_bar.is_cocycle(2, torus_bar.apply(1, f))


@pytest.mark.parametrize("name", sorted(config.GROUP_FIXTURES))
def test_differential_squares_to_zero_on_every_fixture(name, allow_p2):
    G = build_fixture(name)
    Q = FiniteQuotient(G, int(G.nu0 * G.e) + 1)
    top = 3 if (Q.order - 1) ** 3 <= config.BAR_CAP else 2
    B = BarComplex(Q, Coefficients.trivial(G.p), top)
    for n in range(top - 1):
        B.check_d_squared(n, samples=4, seed=2024)


def test_skipped_d_squared_check_is_logged(caplog):
    caplog.set_level(logging.INFO, logger="lazardlab.group_cohom")
    Q = FiniteQuotient(build_fixture("gl2-3"), 2)
    assert (Q.order - 1) ** 3 > D_SQUARED_AUTO_CELLS
    BarComplex(Q, Coefficients.trivial(3), 3)
    assert "d∘d check from degree 1 skipped" in caplog.text
    assert "from degree 0 skipped" not in caplog.text


def test_cup_of_degree_one_classes(torus_bar):
    Z = torus_bar.kernel(1)
    assert Z.shape[0] == 2
    c = group_cup(torus_bar, Z[0], 1, Z[1], 1)
    assert torus_bar.is_cocycle(2, c)
    assert not is_coboundary(torus_bar, 2, c)
    with pytest.raises(ValueError):
        group_cup(torus_bar, np.ones(torus_bar.dim(1), dtype=np.int64), 1, Z[0], 1)


def test_inflation_commutes_with_differential():
    G = build_fixture("torus3")
    small = BarComplex(FiniteQuotient(G, 2), Coefficients.trivial(3), 2)
    big = BarComplex(FiniteQuotient(G, 3), Coefficients.trivial(3), 2)
    infl = Inflation(small, big)
    assert infl.check_commutes(0)
    assert infl.check_commutes(1)
    with pytest.raises(ValueError):
        Inflation(big, small)


def test_action_must_factor_through_quotient():
    G = build_fixture("gl2-3")
    coeff = Coefficients(27, 1, DeterminantAction(G, 3), "det mod 27")
    with pytest.raises(HypothesisFailure):
        coeff.on_quotient(FiniteQuotient(G, 2))
    assert Coefficients.trivial(9).trivial_mod(FiniteQuotient(G, 2))


def test_bar_complex_budget():
    Q = FiniteQuotient(build_fixture("gl2-3"), 3)
    with pytest.raises(BudgetExceeded):
        BarComplex(Q, Coefficients.trivial(3), 2)


def test_cyclic_group_with_mod_nine_coefficients():
    result = continuous_cohomology(build_fixture("cyclic3"), Coefficients.trivial(9), 1)
    assert result.divisors(0) == [9]
    assert result.divisors(1) == [9]
    assert result.certified
    assert result.degrees[1].stabilized


def test_torus_cohomology():
    result = continuous_cohomology(build_fixture("torus3"), Coefficients.trivial(3), 2)
    assert result.dims() == [1, 2, 1]
    assert result.certified
    assert result.to_dict()["side"] == "group"


@pytest.mark.slow
def test_heisenberg_cohomology():
    result = continuous_cohomology(build_fixture("heisenberg3"), Coefficients.trivial(3), 2)
    assert result.dims() == [1, 3, 3]
