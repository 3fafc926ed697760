# tests/test_padic_core.py
import random
from fractions import Fraction

import pytest

import config
from errors import ConvergenceError, InsufficientPrecision
from padic_core import (
    PAdicMatrix,
    PAdicScalar,
    RingSpec,
    matrix_exp,
    matrix_log,
    random_matrix,
    scalar_log,
    vp,
)


def _random_scalar(ring: RingSpec, rng: random.Random) -> PAdicScalar:
    return PAdicScalar(ring, tuple(rng.randrange(m) for m in ring.moduli))


def _oracle_log_1_plus(p: int, x: int, modulus: int, terms: int = 80) -> int:
    total = Fraction(0)
    for m in range(1, terms):
        total += Fraction((-1) ** (m + 1) * x ** m, m)
    return total.numerator * pow(total.denominator, -1, modulus) % modulus


def test_ring_rejects_non_eisenstein():
    with pytest.raises(ValueError):
        RingSpec(p=5, e=2, eisenstein_poly=(-25, 0, 1), precision_N=4)
    with pytest.raises(ValueError):
        RingSpec(p=5, e=2, eisenstein_poly=(-5, 1, 1), precision_N=4)
    with pytest.raises(ValueError):
        RingSpec(p=6)


def test_rho_values():
    assert RingSpec(p=3).rho == 1
    assert RingSpec(p=5, e=2, eisenstein_poly=(-5, 0, 1)).rho == 1
    assert RingSpec(p=3, e=2, eisenstein_poly=(-3, 0, 1)).rho == 2
    assert RingSpec(p=2).rho == 2


def test_pi_squared_is_p():
    ring = RingSpec(p=5, e=2, eisenstein_poly=(-5, 0, 1), precision_N=6)
    pi = PAdicScalar.pi(ring)
    assert (pi * pi).coeffs == ring.from_int(5)
    assert (pi * pi).valuation == 1
    assert (pi ** 3).valuation == Fraction(3, 2)
    assert PAdicScalar.of(ring, 0).valuation == ring.bottom


@pytest.mark.parametrize("ring", [
    RingSpec(p=3, precision_N=7),
    RingSpec(p=5, e=2, eisenstein_poly=(-5, 0, 1), precision_N=9),
    RingSpec(p=3, e=3, eisenstein_poly=(3, 3, 0, 1), precision_N=10),
])
def test_valuation_axioms_on_random_pairs(ring):
    rng = random.Random(11)
    for _ in range(1000):
        x, y = _random_scalar(ring, rng), _random_scalar(ring, rng)
        assert (x - y).valuation >= min(x.valuation, y.valuation)
        if x.valuation + y.valuation < ring.bottom:
            assert (x * y).valuation == x.valuation + y.valuation


def test_cube_of_one_plus_pi():
    ring = RingSpec(p=3, e=2, eisenstein_poly=(-3, 0, 1), precision_N=8)
    x = PAdicScalar.of(ring, 1) + PAdicScalar.pi(ring)
    one = PAdicScalar.of(ring, 1)
    assert (x - one).valuation == Fraction(1, 2)
    assert (x ** 3 - one).valuation == Fraction(3, 2)


def test_log_of_unipotent_truncates():
    ring = RingSpec(p=3, precision_N=5)
    A = PAdicMatrix.from_rows(ring, [[1, 3], [0, 1]])
    assert matrix_log(A) == PAdicMatrix.from_rows(ring, [[0, 3], [0, 0]])


def test_log_of_scalar_matches_series_oracle():
    ring = RingSpec(p=3, precision_N=3)
    A = PAdicMatrix.from_rows(ring, [[4, 0], [0, 4]])
    L = matrix_log(A)
    expected = _oracle_log_1_plus(3, 3, 27)
    assert L.to_int_rows() == [[expected, 0], [0, expected]]
    assert scalar_log(PAdicScalar.of(ring, 4)).coeffs == (expected,)


def test_log_exp_round_trip_unramified():
    ring = RingSpec(p=3, precision_N=6)
    rng = random.Random(5)
    ident = PAdicMatrix.identity(ring, 2)
    for _ in range(160):
        X = random_matrix(ring, 2, Fraction(1), rng)
        A = ident + X
        L = matrix_log(A)
        if not X.is_zero():
            assert L.omega() == X.omega()
        assert matrix_exp(L) == A
        assert matrix_log(matrix_exp(X)) == X


def test_log_exp_round_trip_ramified():
    ring = RingSpec(p=5, e=2, eisenstein_poly=(-5, 0, 1), precision_N=8)
    rng = random.Random(9)
    ident = PAdicMatrix.identity(ring, 2)
    for _ in range(40):
        X = random_matrix(ring, 2, Fraction(1, 2), rng)
        A = ident + X
        assert matrix_exp(matrix_log(A)) == A
        if not X.is_zero():
            assert matrix_log(A).omega() == X.omega()


def test_exp_of_zero_and_nilpotent():
    ring = RingSpec(p=3, precision_N=4)
    zero = PAdicMatrix.zeros(ring, 2)
    assert matrix_exp(zero) == PAdicMatrix.identity(ring, 2)
    X = PAdicMatrix.from_rows(ring, [[0, 9], [0, 0]])
    assert matrix_exp(X) == PAdicMatrix.from_rows(ring, [[1, 9], [0, 1]])


def test_log_outside_domain_raises():
    ring = RingSpec(p=3, precision_N=4)
    with pytest.raises(ConvergenceError):
        matrix_log(PAdicMatrix.from_rows(ring, [[2, 0], [0, 1]]))
    with pytest.raises(ConvergenceError):
        matrix_exp(PAdicMatrix.from_rows(ring, [[1, 0], [0, 0]]))


def test_log_reports_required_precision(monkeypatch):
    ring = RingSpec(p=3, precision_N=6)
    monkeypatch.setattr(config, "MAX_PRECISION", 6)
    A = PAdicMatrix.from_rows(ring, [[4]])
    with pytest.raises(InsufficientPrecision) as info:
        matrix_log(A)
    assert info.value.required is not None and info.value.required > 6


def test_vp():
    assert vp(54, 3) == 3
    assert vp(-10, 5) == 1
    with pytest.raises(ValueError):
        vp(0, 3)
