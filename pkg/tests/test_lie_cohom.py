# tests/test_lie_cohom.py
import numpy as np
import pytest

from lazard_lie import LieModule, adjoint_module, lattice_fixture, lazard_lie
from lie_cohom import (
    CEComplex,
    cohomology,
    cup_product,
    exterior_span,
    is_coboundary,
    is_minimal_mod_p,
    rational_betti,
    shuffle_sign,
    truncate_divisors,
    wedge,
)
from pgroups import build_fixture


@pytest.fixture(scope="module")
def heisenberg():
    return lattice_fixture("heisenberg3")


def test_quaternion_lattice_mod_five():
    C = CEComplex(lattice_fixture("quaternion5"), modulus=5)
    report = cohomology(C)
    assert report.dims() == [1, 3, 4, 3, 1]
    assert all(d == 5 for n in range(5) for d in report.divisors(n))
    assert not is_minimal_mod_p(C)


def test_heisenberg_mod_three_is_minimal(heisenberg):
    C = CEComplex(heisenberg, modulus=3)
    assert cohomology(C).dims() == [1, 3, 3, 1]
    assert is_minimal_mod_p(C)


def test_heisenberg_integral_cohomology(heisenberg):
    C = CEComplex(heisenberg)
    report = cohomology(C)
    assert rational_betti(C) == [1, 2, 2, 1]
    assert report.divisors(2) == [3, 0, 0]
    assert report.degrees[2].free_rank == 2
    assert report.divisors(1) == [0, 0]
    assert report.dims() == [1, 3, 3, 1]


def test_abelian_lattice_mod_nine():
    report = cohomology(CEComplex(lattice_fixture("abelian3"), modulus=9))
    assert report.dims() == [1, 3, 3, 1]
    assert report.divisors(1) == [9, 9, 9]
    assert report.degrees[1].free_rank == 3


def test_divisors_truncate_compatibly(heisenberg):
    high = cohomology(CEComplex(heisenberg, modulus=27))
    for q in (9, 3):
        low = cohomology(CEComplex(heisenberg, modulus=q))
        for n in range(4):
            assert truncate_divisors(high.divisors(n), q) == sorted(low.divisors(n))


def test_differentials_square_to_zero_with_module(heisenberg):
    M = LieModule.trivial(3, 9, rank=2)
    C = CEComplex(heisenberg, M)
    assert C.dim(1) == 6
    assert cohomology(C).dims() == [2, 6, 6, 2]


def test_exact_complex_needs_exact_lattice():
    L = lazard_lie(build_fixture("heisenberg3"))
    with pytest.raises(ValueError):
        CEComplex(L)
    with pytest.raises(ValueError):
        CEComplex(lattice_fixture("heisenberg3"), modulus=25)


def test_cochain_orders_indices_with_sign(heisenberg):
    C = CEComplex(heisenberg, modulus=9)
    assert list(C.cochain({(2, 0): 1}, 2)) == [0, 8, 0]
    assert shuffle_sign((2,), (0,)) == -1


def test_wedge_of_degree_one_cocycles(heisenberg):
    C = CEComplex(heisenberg)
    f0, f1, f2 = (C.cochain({(j,): 1}, 1) for j in range(3))
    product = cup_product(C, f0, 1, f2, 1)
    assert list(product) == [0, 1, 0]
    assert list(wedge(C, f2, 1, f0, 1)) == [0, -1, 0]
    with pytest.raises(ValueError):
        cup_product(C, f1, 1, f0, 1)


def test_coboundaries_depend_on_the_modulus(heisenberg):
    target = {(0, 2): 1}
    C3 = CEComplex(heisenberg, modulus=3)
    assert not is_coboundary(C3, 2, C3.cochain(target, 2))
    C9 = CEComplex(heisenberg, modulus=9)
    assert not is_coboundary(C9, 2, C9.cochain(target, 2))
    assert is_coboundary(C9, 2, C9.cochain({(0, 2): 3}, 2))
    assert is_coboundary(C9, 1, np.zeros(3, dtype=object))
    with pytest.raises(ValueError):
        is_coboundary(CEComplex(heisenberg), 2, C9.cochain(target, 2))


def test_exterior_span():
    spans = exterior_span(CEComplex(lattice_fixture("abelian3"), modulus=3))
    assert all(s.exterior for s in spans)
    quaternion = exterior_span(CEComplex(lattice_fixture("quaternion5"), modulus=5))
    assert quaternion[1].exterior
    assert not quaternion[2].exterior


def test_adjoint_coefficients_for_gl2():
    G = build_fixture("gl2-3")
    L = lazard_lie(G)
    C = CEComplex(L, adjoint_module(G, L, 1))
    dims = cohomology(C).dims()
    assert dims[0] == 4
    assert dims[1] == 16
