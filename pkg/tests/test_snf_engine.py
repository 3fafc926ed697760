# tests/test_snf_engine.py
import random

import numpy as np
import pytest
import sympy

from errors import BudgetExceeded, ConstructionError
from snf_engine import (
    format_matrix_text,
    homology_divisors,
    kernel_mod,
    lazy_kernel,
    parse_matrix_text,
    rank_mod_p,
    rational_rank,
    snf,
    snf_oracle,
    solve_mod,
    subquotient_divisors,
)


def _random_int_matrix(rng, max_dim=6, bound=12):
    m, n = rng.randint(1, max_dim), rng.randint(1, max_dim)
    return [[rng.randint(-bound, bound) for _ in range(n)] for _ in range(m)]


def _is_chain(divisors):
    for a, b in zip(divisors, divisors[1:]):
        if a == 0:
            if b != 0:
                return False
        elif b % a:
            return False
    return True


def test_documented_examples():
    assert snf([[1, 0], [0, 1]]).divisors == (1, 1)
    assert snf([[2, 4], [6, 8]]).divisors == (2, 4)
    assert snf([[3]], 27).divisors == (3,)
    assert snf_oracle([[0]]).divisors == (0,)
    assert snf_oracle([[6, 0], [0, 10]]).divisors == (2, 30)
    assert snf([[6, 0], [0, 10]]).divisors == (2, 30)
    assert snf([], 9).divisors == ()


def test_snf_matches_oracle_over_integers():
    rng = random.Random(2024)
    for _ in range(250):
        A = _random_int_matrix(rng)
        fast = snf(A)
        assert fast.divisors == snf_oracle(A).divisors
        assert _is_chain(fast.divisors)


@pytest.mark.parametrize("modulus", [27, 25, 2 ** 5])
def test_snf_matches_oracle_mod_prime_power(modulus):
    rng = random.Random(modulus)
    for _ in range(85):
        A = [[x % modulus for x in row] for row in _random_int_matrix(rng, bound=modulus)]
        expected = snf_oracle(A, modulus).divisors
        assert snf(A, modulus, method="dense").divisors == expected
        assert snf(A, modulus, method="sparse").divisors == expected


def test_transforms_reproduce_diagonal():
    rng = random.Random(3)
    for _ in range(30):
        A = _random_int_matrix(rng, max_dim=5)
        res = snf(A, keep_transforms=True)
        D = res.left.dot(np.array(A, dtype=object)).dot(res.right)
        m, n = D.shape
        for i in range(m):
            for j in range(n):
                assert D[i, j] == (res.divisors[i] if i == j else 0)
        A9 = [[x % 9 for x in row] for row in A]
        res9 = snf(A9, 9, keep_transforms=True)
        D9 = (res9.left.astype(object).dot(np.array(A9, dtype=object)).dot(res9.right.astype(object))) % 9
        for i in range(m):
            for j in range(n):
                assert D9[i, j] == ((res9.divisors[i] % 9) if i == j else 0)


def test_oracle_cap():
    with pytest.raises(BudgetExceeded):
        snf_oracle([[1] * 9])


def test_matrix_text_format():
    text = format_matrix_text([[1, 2, 3], [4, 5, 6]], 9)
    assert text.splitlines()[0] == "2 3 9"
    rows, modulus = parse_matrix_text(text)
    assert rows == [[1, 2, 3], [4, 5, 6]] and modulus == 9
    with pytest.raises(ValueError):
        parse_matrix_text("2 2 0\n1 2 3")


def test_kernel_mod_small():
    K = kernel_mod([[3]], 9)
    assert K.tolist() == [[3]]
    K = kernel_mod([[1, 1]], 3)
    assert K.shape == (1, 2)
    assert (K.sum(axis=1) % 3 == 0).all()


def test_subquotient_divisors():
    assert subquotient_divisors(np.array([[1]]), np.array([[3]]), 9) == [3]
    assert subquotient_divisors(np.array([[1]]), None, 9) == [9]
    assert subquotient_divisors(np.array([[3]]), np.array([[1]]), 9) == []
    # kernel of multiplication by 3 on Z/9 is 3Z/9 = Z/3; modulo the same image it dies
    d = np.array([[3]])
    assert homology_divisors(np.array([[0]]), d, 9, 1) == [3]
    assert homology_divisors(d, d, 9, 1) == []


def test_lazy_kernel_agrees_with_dense():
    rng = np.random.default_rng(0)
    q = 9
    ncols = 12
    base = rng.integers(0, q, size=(5, ncols))
    mix = rng.integers(0, q, size=(400, 5))
    A = (mix @ base) % q
    dense = kernel_mod(A, q)

    def rows_fn(idx):
        return A[idx]

    def residual_fn(K):
        return np.nonzero(((A @ K.T) % q).any(axis=1))[0]

    lazy = lazy_kernel(ncols, rows_fn, residual_fn, A.shape[0], q, seed=1)
    assert not ((A @ lazy.T) % q).any()
    assert subquotient_divisors(dense.T, lazy.T, q) == []
    assert subquotient_divisors(lazy.T, dense.T, q) == []


def test_solve_mod():
    A = [[3, 0], [0, 3], [0, 0]]
    x, exact = solve_mod(A, [15, 21, 0], 81)
    assert exact == 3
    assert x == [5, 7]
    with pytest.raises(ConstructionError):
        solve_mod(A, [1, 0, 0], 81)


def test_ranks():
    assert rank_mod_p([[3, 0], [0, 1]], 3) == 1
    assert rational_rank([[3, 0], [0, 1]]) == 2
    assert rational_rank([[1, 2], [2, 4]]) == 1


def test_integer_snf_keeps_entries_bounded():
    A = [[8, -10, -9, -5, -11, 4], [-8, -6, 8, 7, -10, 4], [-7, -5, 3, 6, 11, -7],
         [-7, -10, -8, 7, -9, 7], [5, 7, 8, -12, 7, -9], [5, -7, 5, 10, -2, -12]]
    assert snf(A).divisors == (1, 1, 1, 1, 3, 1044129)
    assert snf_oracle(A).divisors == (1, 1, 1, 1, 3, 1044129)
    assert snf(A, 27).divisors == (1, 1, 1, 1, 3, 3)


def test_integer_snf_on_larger_matrices():
    rng = random.Random(91)
    for _ in range(10):
        A = [[rng.randint(-50, 50) for _ in range(12)] for _ in range(12)]
        res = snf(A)
        assert _is_chain(res.divisors)
        det = abs(int(sympy.Matrix(A).det()))
        product = 1
        for d in res.divisors:
            product *= d
        assert product == det
    singular = [[1, 2, 3], [2, 4, 6], [1, 0, 1]]
    assert snf(singular).divisors == (1, 2, 0)
