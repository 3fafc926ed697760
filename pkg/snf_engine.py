# snf_engine.py
# ------------------------------------------------------------
# Smith normal form over Z and Z/p^k, plus the exact linear algebra
# the cohomology code is built on.
# • snf: over Z, Bareiss rank and a nonzero maximal minor D, then Bezout
#   elimination in Z/D (entries stay below D); Euclid pivoting with exact
#   transforms on request. Over Z/p^k, minimum-valuation pivoting, dense numpy
#   int64 up to DENSE_COLUMN_LIMIT columns and a sparse dict-of-rows
#   Markowitz elimination beyond.
# • snf_oracle: determinantal divisors (gcds of minors), small inputs only.
# • kernel_mod / lazy_kernel / subquotient_divisors / solve_mod: kernels,
#   images modulo images, and p-adic linear solves read off the transforms.
# Matrix text format: "rows cols modulus" then row-major integers (0 = over Z).
# ------------------------------------------------------------
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations
from pathlib import Path
from typing import Callable, Optional, Sequence

import numpy as np
import sympy

import config
from errors import BudgetExceeded, ConstructionError

log = logging.getLogger("lazardlab.snf_engine")

INT64_SAFE_MODULUS = 2 ** 31


@dataclass(frozen=True)
class SNFResult:
    divisors: tuple[int, ...]
    modulus: int = 0  # 0 means over Z
    left: Optional[np.ndarray] = None
    right: Optional[np.ndarray] = None

    @property
    def rank(self) -> int:
        if self.modulus:
            return sum(1 for d in self.divisors if d % self.modulus)
        return sum(1 for d in self.divisors if d)

    def nontrivial(self) -> list[int]:
        """Divisors other than 1: the cyclic summands of the cokernel (restricted to min(rows, cols))."""
        return [d for d in self.divisors if d != 1]


@lru_cache(maxsize=None)
def prime_power(q: int) -> tuple[int, int]:
    """Split q = p^k, raising ValueError otherwise."""
    if q < 2:
        raise ValueError(f"modulus {q} is not a prime power")
    f = sympy.factorint(q)
    if len(f) != 1:
        raise ValueError(f"modulus {q} is not a prime power")
    (p, k), = f.items()
    return int(p), int(k)


def _rows_of(A) -> list[list[int]]:
    if isinstance(A, np.ndarray):
        return [[int(x) for x in row] for row in A.tolist()] if A.ndim == 2 else []
    return [[int(x) for x in row] for row in A]


def _shape(rows: list[list[int]], ncols: Optional[int] = None) -> tuple[int, int]:
    m = len(rows)
    n = len(rows[0]) if m else (ncols or 0)
    for r in rows:
        if len(r) != n:
            raise ValueError("matrix is not rectangular")
    return m, n


def as_mod_array(A, q: int) -> np.ndarray:
    """Reduce to an int64 array with entries in [0, q)."""
    if isinstance(A, np.ndarray) and A.dtype == np.int64:
        return np.mod(A, q)
    arr = np.asarray(A, dtype=object)
    if arr.size == 0:
        return np.zeros(arr.shape if arr.ndim == 2 else (0, 0), dtype=np.int64)
    return np.asarray(arr % q, dtype=np.int64)


# --------------- public entry point ---------------
def snf(A, modulus: int = 0, keep_transforms: bool = False, method: str = "auto") -> SNFResult:
    """
    Elementary divisors of A (rows x cols), min(rows, cols) of them, sorted by divisibility.
    Over Z/p^k every divisor is a power of p and p^k stands for a zero diagonal entry.
    With keep_transforms the result carries left/right unimodular P, Q with P·A·Q = diag.
    """
    if method not in ("auto", "dense", "sparse"):
        raise ValueError(f"unknown snf method '{method}'")
    if modulus == 0:
        rows = _rows_of(A)
        return _snf_integer(rows, keep_transforms)
    p, k = prime_power(modulus)
    shape = np.shape(A)
    ncols = shape[1] if len(shape) == 2 else 0
    if method == "auto":
        sparse = (ncols > config.DENSE_COLUMN_LIMIT or modulus > INT64_SAFE_MODULUS) and not keep_transforms
        method = "sparse" if sparse else "dense"
    if method == "dense":
        if modulus > INT64_SAFE_MODULUS:
            raise ValueError(f"dense SNF needs modulus <= 2^31, got {modulus}")
        return _snf_local_dense(as_mod_array(A, modulus), p, k, keep_transforms, keep_transforms)
    if keep_transforms:
        raise ValueError("the sparse SNF path does not track transforms")
    return _snf_local_sparse(_rows_of(A), p, k, ncols)


# --------------- over Z ---------------
def _identity(n: int) -> list[list[int]]:
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def _bareiss(rows: list[list[int]]) -> tuple[int, int]:
    """Rank r and |a nonzero r x r minor| by fraction-free elimination (1 when r = 0)."""
    A = [list(r) for r in rows]
    m, n = _shape(A)
    prev, r = 1, 0
    while r < min(m, n):
        piv = next(((i, j) for i in range(r, m) for j in range(r, n) if A[i][j]), None)
        if piv is None:
            break
        i0, j0 = piv
        A[r], A[i0] = A[i0], A[r]
        for row in A:
            row[r], row[j0] = row[j0], row[r]
        a = A[r][r]
        for i in range(r + 1, m):
            ai = A[i][r]
            row_i, row_r = A[i], A[r]
            for j in range(r + 1, n):
                row_i[j] = (row_i[j] * a - ai * row_r[j]) // prev
            row_i[r] = 0
        prev = a
        r += 1
    return r, abs(prev)


def _snf_mod_composite(rows: list[list[int]], M: int) -> list[int]:
    """Diagonal of the SNF over Z/M (any M >= 2), each entry normalized to gcd(d, M); entries stay in [0, M)."""
    A = [[x % M for x in r] for r in rows]
    m, n = _shape(A)
    diag = []
    for t in range(min(m, n)):
        best = None
        for i in range(t, m):
            for j in range(t, n):
                x = A[i][j]
                if x:
                    g = math.gcd(x, M)
                    if best is None or g < best[0]:
                        best = (g, i, j)
        if best is None:
            break
        _, i0, j0 = best
        A[t], A[i0] = A[i0], A[t]
        for row in A:
            row[t], row[j0] = row[j0], row[t]
        while True:
            for i in range(t + 1, m):
                b = A[i][t]
                if not b:
                    continue
                a = A[t][t]
                rt, ri = A[t], A[i]
                if b % a == 0:
                    c = b // a
                    A[i] = [(w - c * u) % M for u, w in zip(rt, ri)]
                else:
                    g, x, y = _egcd(a, b)
                    A[t] = [(x * u + y * w) % M for u, w in zip(rt, ri)]
                    A[i] = [((-b // g) * u + (a // g) * w) % M for u, w in zip(rt, ri)]
            for j in range(t + 1, n):
                b = A[t][j]
                if not b:
                    continue
                a = A[t][t]
                if b % a == 0:
                    c = b // a
                    for row in A:
                        row[j] = (row[j] - c * row[t]) % M
                else:
                    g, x, y = _egcd(a, b)
                    for row in A:
                        u, w = row[t], row[j]
                        row[t] = (x * u + y * w) % M
                        row[j] = ((-b // g) * u + (a // g) * w) % M
            if any(A[i][t] for i in range(t + 1, m)):
                continue
            g = math.gcd(A[t][t], M)
            bad = next((i for i in range(t + 1, m) for j in range(t + 1, n) if A[i][j] % g), None)
            if bad is None:
                break
            A[t] = [(u + w) % M for u, w in zip(A[t], A[bad])]
        diag.append(math.gcd(A[t][t], M))
    return diag + [M] * (min(m, n) - len(diag))


def _snf_integer(rows: list[list[int]], keep: bool) -> SNFResult:
    """
    Without transforms: rank r and a nonzero r x r minor D from Bareiss, then Bezout
    elimination over Z/D. The nonzero divisors divide D, so they survive unchanged.
    """
    if keep:
        return _snf_integer_exact(rows)
    m, n = _shape(rows)
    size = min(m, n)
    r, minor = _bareiss(rows)
    if r == 0 or minor == 1:
        return SNFResult(tuple([1] * r + [0] * (size - r)), 0)
    local = sorted(_snf_mod_composite(rows, minor))
    log.debug("[snf_engine] %dx%d over Z: rank %d, working modulo %d", m, n, r, minor)
    return SNFResult(tuple(local[:r] + [0] * (size - r)), 0)


def _snf_integer_exact(rows: list[list[int]]) -> SNFResult:
    """Euclid pivoting with unimodular P, Q tracked over Z; meant for small matrices."""
    A = [list(r) for r in rows]
    m, n = _shape(A)
    P = _identity(m)
    Q = _identity(n)

    def swap_rows(i, j):
        A[i], A[j] = A[j], A[i]
        if P is not None:
            P[i], P[j] = P[j], P[i]

    def swap_cols(i, j):
        for M in (A, Q) if Q is not None else (A,):
            for row in M:
                row[i], row[j] = row[j], row[i]

    def row_axpy(dst, src, c):  # row_dst += c · row_src
        for M in (A, P) if P is not None else (A,):
            rs, rd = M[src], M[dst]
            for j, x in enumerate(rs):
                if x:
                    rd[j] += c * x

    def col_axpy(dst, src, c):  # col_dst += c · col_src
        for M in (A, Q) if Q is not None else (A,):
            for row in M:
                if row[src]:
                    row[dst] += c * row[src]

    diag = []
    for t in range(min(m, n)):
        best = None
        for i in range(t, m):
            for j in range(t, n):
                x = A[i][j]
                if x and (best is None or abs(x) < best[0]):
                    best = (abs(x), i, j)
        if best is None:
            break
        _, i0, j0 = best
        swap_rows(t, i0)
        swap_cols(t, j0)
        while True:
            changed = False
            for i in range(t + 1, m):
                if A[i][t]:
                    row_axpy(i, t, -(A[i][t] // A[t][t]))
                    if A[i][t]:
                        swap_rows(t, i)
                        changed = True
            for j in range(t + 1, n):
                if A[t][j]:
                    col_axpy(j, t, -(A[t][j] // A[t][t]))
                    if A[t][j]:
                        swap_cols(t, j)
                        changed = True
            if changed:
                continue
            bad = next((i for i in range(t + 1, m) for j in range(t + 1, n) if A[i][j] % A[t][t]), None)
            if bad is None:
                break
            row_axpy(t, bad, 1)
        if A[t][t] < 0:
            A[t] = [-x for x in A[t]]
            if P is not None:
                P[t] = [-x for x in P[t]]
        diag.append(A[t][t])
    diag += [0] * (min(m, n) - len(diag))
    left = np.array(P, dtype=object)
    right = np.array(Q, dtype=object)
    return SNFResult(tuple(diag), 0, left, right)


# --------------- over Z/p^k, dense ---------------
def _first_min_valuation(sub: np.ndarray, powers: list[int], k: int) -> Optional[tuple[int, int, int]]:
    for v in range(k):
        mask = (sub % powers[v + 1]) != 0
        if mask.any():
            flat = int(np.argmax(mask))
            i, j = divmod(flat, sub.shape[1])
            return v, i, j
    return None


def _snf_local_dense(A: np.ndarray, p: int, k: int, keep_left: bool, keep_right: bool) -> SNFResult:
    q = p ** k
    A = np.array(A, dtype=np.int64) % q
    m, n = A.shape if A.ndim == 2 else (0, 0)
    P = np.eye(m, dtype=np.int64) if keep_left else None
    Q = np.eye(n, dtype=np.int64) if keep_right else None
    powers = [p ** j for j in range(k + 1)]
    vals = []
    for t in range(min(m, n)):
        found = _first_min_valuation(A[t:, t:], powers, k)
        if found is None:
            break
        v, i0, j0 = found
        i0 += t
        j0 += t
        if i0 != t:
            A[[t, i0]] = A[[i0, t]]
            if P is not None:
                P[[t, i0]] = P[[i0, t]]
        if j0 != t:
            A[:, [t, j0]] = A[:, [j0, t]]
            if Q is not None:
                Q[:, [t, j0]] = Q[:, [j0, t]]
        unit = int(A[t, t]) // powers[v]
        if unit != 1:
            inv = pow(unit, -1, q)
            A[t, t:] = (A[t, t:] * inv) % q
            if P is not None:
                P[t] = (P[t] * inv) % q
        col = A[t + 1:, t] // powers[v]
        if col.any():
            A[t + 1:, t:] = (A[t + 1:, t:] - np.outer(col, A[t, t:])) % q
            if P is not None:
                P[t + 1:] = (P[t + 1:] - np.outer(col, P[t])) % q
        row = A[t, t + 1:] // powers[v]
        if row.any():
            A[t, t + 1:] = 0
            if Q is not None:
                Q[:, t + 1:] = (Q[:, t + 1:] - np.outer(Q[:, t], row)) % q
        vals.append(v)
    divisors = [powers[v] for v in vals] + [q] * (min(m, n) - len(vals))
    return SNFResult(tuple(divisors), q, P, Q)


# --------------- over Z/p^k, sparse ---------------
def _snf_local_sparse(rows: list[list[int]], p: int, k: int, ncols: int) -> SNFResult:
    q = p ** k
    m, n = _shape(rows, ncols)
    R: dict[int, dict[int, int]] = {}
    col_count = [0] * n
    for i, row in enumerate(rows):
        d = {j: x % q for j, x in enumerate(row) if x % q}
        if d:
            R[i] = d
            for j in d:
                col_count[j] += 1

    vals = []
    level = 0
    while R and level < k:
        step = p ** (level + 1)
        best = None
        for i, d in R.items():
            rcost = len(d) - 1
            for j, x in d.items():
                if x % step:
                    cost = rcost * (col_count[j] - 1)
                    if best is None or cost < best[0]:
                        best = (cost, i, j)
                        if cost == 0:
                            break
            if best is not None and best[0] == 0:
                break
        if best is None:
            level += 1
            continue
        _, pi, pj = best
        prow = R.pop(pi)
        for j in prow:
            col_count[j] -= 1
        unit = prow[pj] // p ** level
        inv = pow(unit, -1, q)
        prow = {j: (x * inv) % q for j, x in prow.items()}
        base = p ** level
        for i in [i for i, d in R.items() if pj in d]:
            d = R[i]
            f = d[pj] // base
            for j, x in prow.items():
                old = d.get(j, 0)
                new = (old - f * x) % q
                if new:
                    if not old:
                        col_count[j] += 1
                    d[j] = new
                elif old:
                    col_count[j] -= 1
                    del d[j]
            if not d:
                del R[i]
        vals.append(level)
    divisors = [p ** v for v in vals] + [q] * (min(m, n) - len(vals))
    return SNFResult(tuple(divisors), q)


def vp_local(x: int, p: int, k: int) -> int:
    """Valuation of x modulo p^k, capped at k."""
    x %= p ** k
    if x == 0:
        return k
    v = 0
    while x % p == 0:
        x //= p
        v += 1
    return v


# --------------- oracle ---------------
def _egcd(a: int, b: int) -> tuple[int, int, int]:
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        t = a // b
        a, b = b, a - t * b
        x0, x1 = x1, x0 - t * x1
        y0, y1 = y1, y0 - t * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


def snf_oracle(A, modulus: int = 0) -> SNFResult:
    """
    Elementary divisors from determinantal divisors: D_i = gcd of all i x i minors and
    d_i = D_i / D_(i-1). Every minor is an exact Bareiss determinant; used to cross-check snf in tests.
    """
    rows = _rows_of(A)
    m, n = _shape(rows)
    cap = config.ORACLE_CAP
    if m > cap or n > cap:
        raise BudgetExceeded("snf_oracle dimensions", cap, max(m, n))
    diag = []
    prev = 1
    for i in range(1, min(m, n) + 1):
        D = 0
        for rs in combinations(range(m), i):
            for cs in combinations(range(n), i):
                r, minor = _bareiss([[rows[a][b] for b in cs] for a in rs])
                if r == i:
                    D = math.gcd(D, minor)
                    if D == prev:
                        break
            if D == prev:
                break
        if D == 0:
            break
        diag.append(D // prev)
        prev = D
    diag += [0] * (min(m, n) - len(diag))
    if modulus:
        p, k = prime_power(modulus)
        diag = [p ** min(vp_local(d, p, k), k) if d else modulus for d in diag]
        diag.sort()
    return SNFResult(tuple(diag), modulus)


# --------------- matrix text format ---------------
def parse_matrix_text(text: str) -> tuple[list[list[int]], int]:
    tokens = text.split()
    if len(tokens) < 3:
        raise ValueError("matrix header must be 'rows cols modulus'")
    m, n, modulus = (int(t) for t in tokens[:3])
    body = [int(t) for t in tokens[3:]]
    if len(body) != m * n:
        raise ValueError(f"expected {m * n} entries, found {len(body)}")
    return [body[i * n:(i + 1) * n] for i in range(m)], modulus


def format_matrix_text(rows: Sequence[Sequence[int]], modulus: int = 0) -> str:
    m = len(rows)
    n = len(rows[0]) if m else 0
    lines = [f"{m} {n} {modulus}"]
    lines += [" ".join(str(int(x)) for x in row) for row in rows]
    return "\n".join(lines) + "\n"


def read_matrix_file(path: str | Path) -> tuple[list[list[int]], int]:
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"[snf_engine] matrix file not found: {path}")
    return parse_matrix_text(path.read_text(encoding="utf-8"))


# --------------- kernels and subquotients ---------------
def kernel_mod(A, q: int, ncols: Optional[int] = None) -> np.ndarray:
    """Generators (as rows) of {x : A·x ≡ 0 mod q}."""
    p, k = prime_power(q)
    arr = as_mod_array(A, q)
    if arr.ndim != 2 or arr.shape[0] == 0:
        n = arr.shape[1] if arr.ndim == 2 else (ncols or 0)
        return np.eye(n, dtype=np.int64)
    n = arr.shape[1]
    res = _snf_local_dense(arr, p, k, keep_left=False, keep_right=True)
    Q = res.right
    gens = []
    for i in range(n):
        d = res.divisors[i] if i < len(res.divisors) else q
        if d == 1:
            continue
        scale = q // d if d != q else 1
        gens.append((Q[:, i] * scale) % q)
    if not gens:
        return np.zeros((0, n), dtype=np.int64)
    return np.array(gens, dtype=np.int64)


def lazy_kernel(
    ncols: int,
    rows_fn: Callable[[np.ndarray], np.ndarray],
    residual_fn: Callable[[np.ndarray], np.ndarray],
    nrows: int,
    q: int,
    seed: int = 0,
) -> np.ndarray:
    """
    Exact kernel of a tall matrix given only by row access.
    rows_fn(idx) returns the rows idx (len(idx) x ncols, mod q);
    residual_fn(K) returns the indices of rows violated by some generator in K.
    The kernel of a row sample is enlarged with violated rows until none remain.
    """
    if ncols == 0:
        return np.zeros((0, 0), dtype=np.int64)
    if ncols > config.KERNEL_COLUMN_CAP:
        raise BudgetExceeded("kernel columns", config.KERNEL_COLUMN_CAP, ncols)
    rng = np.random.default_rng(seed)
    start = 2 * ncols + 64
    if nrows <= start:
        rows = np.arange(nrows)
    else:
        rows = np.sort(rng.choice(nrows, size=start, replace=False))
    rounds = 0
    while True:
        rounds += 1
        K = kernel_mod(rows_fn(rows), q, ncols) if rows.size else np.eye(ncols, dtype=np.int64)
        if rows.size == nrows or K.shape[0] == 0:
            break
        bad = np.setdiff1d(np.asarray(residual_fn(K), dtype=np.int64), rows)
        if bad.size == 0:
            break
        chunk = max(64, ncols // 2)
        if bad.size > chunk:
            bad = rng.choice(bad, size=chunk, replace=False)
        rows = np.union1d(rows, bad)
    log.debug("[snf_engine] lazy kernel: %d columns, %d/%d rows used, %d rounds, %d generators",
              ncols, rows.size, nrows, rounds, K.shape[0])
    return K


def subquotient_from_kernel(K: np.ndarray, a: int, q: int) -> list[int]:
    """
    Divisors of span(G)/(span(G) ∩ span(S)) given generators K of ker[G | -S],
    where G has a columns. Returns the cyclic orders (1s dropped, q = free summand).
    """
    if a == 0:
        return []
    R = K[:, :a] % q if K.size else np.zeros((0, a), dtype=np.int64)
    R = R[np.any(R != 0, axis=1)] if R.shape[0] else R
    if R.shape[0] == 0:
        return [q] * a
    res = snf(R, q, method="dense")
    divisors = list(res.divisors) + [q] * (a - len(res.divisors))
    return sorted(d for d in divisors if d != 1)


def subquotient_divisors(G, S, q: int) -> list[int]:
    """Cyclic decomposition of span(G)/(span(G) ∩ span(S)) in (Z/q)^n; G, S given by columns."""
    G = as_mod_array(G, q)
    a = G.shape[1] if G.ndim == 2 else 0
    if a == 0:
        return []
    if S is None or np.size(S) == 0:
        block = G
    else:
        block = np.concatenate([G, (-as_mod_array(S, q)) % q], axis=1)
    return subquotient_from_kernel(kernel_mod(block, q), a, q)


def homology_divisors(d_in, d_out, q: int, dim: int) -> list[int]:
    """ker(d_out)/im(d_in) in (Z/q)^dim: d_out is (next x dim), d_in is (dim x prev)."""
    if dim == 0:
        return []
    if d_out is None or np.size(d_out) == 0:
        Z = np.eye(dim, dtype=np.int64)
    else:
        Z = kernel_mod(d_out, q, dim)
    return subquotient_divisors(Z.T if Z.size else np.zeros((dim, 0), dtype=np.int64), d_in, q)


# --------------- solving and ranks ---------------
def solve_mod(A, b, q: int) -> tuple[list[int], int]:
    """
    Solve A·x ≡ b (mod q = p^k). Returns (x, j): x is determined modulo p^j,
    j = k - (largest pivot valuation). Raises ConstructionError when b is not in the image.
    """
    p, k = prime_power(q)
    arr = as_mod_array(A, q)
    m, n = arr.shape
    res = _snf_local_dense(arr, p, k, keep_left=True, keep_right=True)
    rhs = (res.left.astype(object) @ as_mod_array(np.asarray(b).reshape(m, 1), q).astype(object)) % q
    rhs = [int(x) for x in rhs.ravel()]
    y = [0] * n
    worst = 0
    for i in range(m):
        d = res.divisors[i] if i < len(res.divisors) else q
        if d == q:
            if rhs[i] % q:
                raise ConstructionError(f"right-hand side not in the image (row {i} residue {rhs[i]})")
            continue
        if rhs[i] % d:
            raise ConstructionError(f"right-hand side not divisible by pivot {d} at row {i}")
        y[i] = rhs[i] // d
        worst = max(worst, vp_local(d, p, k))
    x = (res.right.astype(object) @ np.array(y, dtype=object).reshape(n, 1)) % q
    exact = k - worst
    return [int(v) % p ** exact for v in x.ravel()], exact


class LinearSolver:
    """Reusable solver for A·X ≡ B (mod q); the SNF of A is computed once."""

    def __init__(self, A, q: int):
        self.q = q
        self.p, self.k = prime_power(q)
        arr = as_mod_array(A, q)
        self.m, self.n = arr.shape
        res = _snf_local_dense(arr, self.p, self.k, keep_left=True, keep_right=True)
        self.left = res.left.astype(object)
        self.right = res.right.astype(object)
        self.divisors = [res.divisors[i] if i < len(res.divisors) else q for i in range(self.m)]
        finite = [vp_local(d, self.p, self.k) for d in self.divisors[: self.n] if d != q]
        self.exact = self.k - max(finite, default=0)

    def solve(self, B) -> np.ndarray:
        """Columns of B are right-hand sides; returns X (n x r) modulo p^exact."""
        B = as_mod_array(np.asarray(B).reshape(self.m, -1), self.q).astype(object)
        rhs = (self.left @ B) % self.q
        Y = np.zeros((self.n, rhs.shape[1]), dtype=object)
        for i in range(self.m):
            d = self.divisors[i]
            row = rhs[i]
            if d == self.q or i >= self.n:
                if any(int(v) % self.q for v in row):
                    raise ConstructionError(f"right-hand side not in the image (row {i})")
                continue
            if any(int(v) % d for v in row):
                raise ConstructionError(f"right-hand side not divisible by pivot {d} at row {i}")
            Y[i] = row // d
        X = (self.right @ Y) % (self.p ** self.exact)
        return X.astype(np.int64)


def solve_mod_many(A, B, q: int) -> tuple[np.ndarray, int]:
    solver = LinearSolver(A, q)
    return solver.solve(B), solver.exact


def rank_mod_p(A, p: int) -> int:
    arr = as_mod_array(A, p)
    if arr.ndim != 2 or arr.size == 0:
        return 0
    return _snf_local_dense(arr, p, 1, False, False).rank


def rational_rank(A) -> int:
    rows = _rows_of(A)
    if not rows or not rows[0]:
        return 0
    return int(sympy.Matrix(rows).rank())
