# tests/test_pgroups.py
from fractions import Fraction

import numpy as np
import pytest

from pgroups import (
    FiniteQuotient,
    MatrixGroupSpec,
    build_fixture,
    build_group,
    check_uniform,
    finite_quotient,
    format_group_spec_text,
    load_group_spec,
    lower_p_series,
    parse_group_spec_text,
    renormalize_valuation,
)
from padic_core import RingSpec


@pytest.mark.parametrize("name,rank", [("ramified5", 2), ("gl2-3", 4), ("heisenberg3", 3),
                                       ("quaternion5", 4), ("torus3", 2)])
def test_fixture_ranks(name, rank):
    assert build_fixture(name).rank == rank


def test_p2_is_guarded_by_default():
    with pytest.raises(ValueError):
        build_fixture("z2-level2")


def test_p2_allowed_with_flag(allow_p2):
    G = build_fixture("z2-level2", precision=10)
    assert G.p == 2


def test_level_below_rho_rejected():
    ring = RingSpec(p=3, e=2, eisenstein_poly=(-3, 0, 1), precision_N=8)
    with pytest.raises(ValueError):
        build_group(MatrixGroupSpec(ring, 1, 1))


def test_invalid_spec_lists_problems():
    ring = RingSpec(p=3, precision_N=6)
    with pytest.raises(ValueError, match="shape"):
        MatrixGroupSpec(ring, 2, 1, shape="triangular")


def test_heisenberg_quotient_order_and_exponent():
    Q = finite_quotient(build_fixture("heisenberg3"), 2)
    assert Q.order == 27
    assert Q.log_order == 3
    assert Q.exponent() == 3


def test_quotient_table_is_a_group():
    Q = FiniteQuotient(build_fixture("heisenberg3"), 2)
    idx = Q.all_indices()
    a, b, c = np.meshgrid(idx, idx, idx, indexing="ij")
    assert (Q.mul(Q.mul(a, b), c) == Q.mul(a, Q.mul(b, c))).all()
    assert (Q.mul(idx, Q.inverse) == 0).all()
    assert (Q.mul(0, idx) == idx).all()


@pytest.mark.parametrize("m,abelian", [(2, True), (3, False)])
def test_heisenberg_quotient_commutativity(m, abelian):
    Q = FiniteQuotient(build_fixture("heisenberg3"), m)
    idx = Q.all_indices()
    a, b = np.meshgrid(idx, idx, indexing="ij")
    assert bool((Q.mul(a, b) == Q.mul(b, a)).all()) is abelian


def test_projection_is_a_homomorphism():
    G = build_fixture("heisenberg3")
    big, small = FiniteQuotient(G, 3), FiniteQuotient(G, 2)
    assert big.order == 3 ** 6
    assert big.is_homomorphism_to(small)


def test_quotient_level_must_exceed_group_level():
    with pytest.raises(ValueError):
        FiniteQuotient(build_fixture("cyclic3-level2"), 2)


def test_index_of_element_round_trip():
    Q = FiniteQuotient(build_fixture("gl2-3"), 2)
    for i in (0, 1, 17, Q.order - 1):
        assert Q.index_of(Q.element(i)) == i


def test_structure_tensor_of_torus_is_diagonal():
    T = build_fixture("torus3").structure_tensor
    assert T.shape == (2, 2, 2)
    assert T[0, 0, 0] == 1 and T[1, 1, 1] == 1
    assert T[0, 1].sum() == 0


def test_cyclic_group_is_uniform():
    verdict = check_uniform(build_fixture("cyclic3", precision=10))
    assert verdict.uniform
    assert verdict.generators == 1
    assert set(verdict.indices) == {3}


def test_heisenberg_is_uniform():
    verdict = check_uniform(build_fixture("heisenberg3", precision=10), depth=3)
    assert verdict.powerful
    assert verdict.uniform
    assert verdict.generators == 3


def test_units_of_two_adic_integers(allow_p2):
    assert not check_uniform(build_fixture("z2-level1", precision=10)).uniform
    assert check_uniform(build_fixture("z2-level2", precision=10)).uniform


def test_lower_p_series_levels_are_filtration_steps():
    series = lower_p_series(build_fixture("torus3", precision=10), 3)
    assert series.indices == [9, 9, 9]
    assert series.filtration_levels() == [1, 2, 3, 4]


def test_lower_p_series_needs_precision():
    from errors import InsufficientPrecision

    with pytest.raises(InsufficientPrecision):
        lower_p_series(build_fixture("cyclic3", precision=4), 4)


def test_renormalize_equi_p_valued_group():
    G = build_fixture("ramified5-weil")
    H = renormalize_valuation(G)
    assert H.nu0 == G.nu0
    with pytest.raises(ValueError):
        renormalize_valuation(build_fixture("ramified5"))


def test_group_spec_text_round_trip(tmp_path):
    spec = MatrixGroupSpec.from_fixture("quaternion5", precision=6)
    text = format_group_spec_text(spec)
    assert parse_group_spec_text(text) == spec
    path = tmp_path / "quat.txt"
    path.write_text(text, encoding="utf-8")
    assert load_group_spec(str(path), precision=8) == spec.with_precision(8)
    assert load_group_spec("heisenberg3").shape == "unipotent"


def test_group_spec_text_rejects_unknown_keys():
    with pytest.raises(ValueError):
        parse_group_spec_text("p = 3\ncolour = blue\n")
    with pytest.raises(ValueError):
        parse_group_spec_text("n = 2\n")


def test_element_from_matrix_rows():
    G = build_fixture("heisenberg3")
    x = G.element([[1, 3, 0], [0, 1, 0], [0, 0, 1]])
    assert G.omega(x) == Fraction(1)
    with pytest.raises(ValueError):
        G.element([[1, 1, 0], [0, 1, 0], [0, 0, 1]])
