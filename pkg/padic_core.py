# padic_core.py
# ------------------------------------------------------------
# Truncated arithmetic in R/π^N where R = Z_p or a totally ramified
# extension Z_p[π] cut out by an Eisenstein polynomial.
# • Elements are coefficient tuples in the π-digit basis 1, π, ..., π^(e-1);
#   digit i is an integer modulo p^ceil((N-i)/e).
# • Valuations are exact Fractions normalized by v(p) = 1; the zero element
#   reports the bottom value N/e ("at least the precision").
# • Matrices are immutable grids of digit tuples.
# • matrix_log / matrix_exp sum their series at a lifted precision so every
#   division by m (or m!) is exact, then reduce back to π^N.
# ------------------------------------------------------------
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Iterable, Sequence, Union

import sympy

import config
from errors import ConvergenceError, InsufficientPrecision

log = logging.getLogger("lazardlab.padic_core")

Digits = tuple[int, ...]


def vp(n: int, p: int) -> int:
    """p-adic valuation of a nonzero integer."""
    if n == 0:
        raise ValueError("vp(0) is infinite")
    n = abs(n)
    k = 0
    while n % p == 0:
        n //= p
        k += 1
    return k


def vp_capped(n: int, p: int, cap: int) -> int:
    return cap if n == 0 else min(vp(n, p), cap)


def ceil_div(a: int, b: int) -> int:
    return -(-a // b)


def legendre(m: int, p: int) -> int:
    """v_p(m!)."""
    total, q = 0, p
    while q <= m:
        total += m // q
        q *= p
    return total


# --------------- Rings ---------------
@dataclass(frozen=True)
class RingSpec:
    p: int
    e: int = 1
    eisenstein_poly: tuple[int, ...] = ()
    precision_N: int = field(default_factory=lambda: config.DEFAULT_PRECISION)

    def __post_init__(self):
        problems = []
        if not sympy.isprime(self.p):
            problems.append(f"p={self.p} is not prime")
        if self.e < 1:
            problems.append(f"ramification index e={self.e} < 1")
        if self.precision_N < 1:
            problems.append(f"precision N={self.precision_N} < 1")
        poly = tuple(int(c) for c in self.eisenstein_poly)
        if not poly and self.e == 1:
            poly = (-self.p, 1)
        if len(poly) != self.e + 1 or poly[-1] != 1:
            problems.append(f"eisenstein polynomial {poly} is not monic of degree {self.e}")
        elif self.p > 1:
            if poly[0] == 0 or vp(poly[0], self.p) != 1:
                problems.append("constant term must have valuation exactly 1")
            if any(c % self.p for c in poly[1:-1]):
                problems.append("middle coefficients must be divisible by p")
        if problems:
            raise ValueError("Invalid RingSpec: " + ", ".join(problems))
        object.__setattr__(self, "eisenstein_poly", poly)
        moduli = tuple(self.p ** max(0, ceil_div(self.precision_N - i, self.e)) for i in range(self.e))
        object.__setattr__(self, "_moduli", moduli)

    # ---- derived data ----
    @property
    def N(self) -> int:
        return self.precision_N

    @property
    def moduli(self) -> tuple[int, ...]:
        return self._moduli

    @property
    def rho(self) -> int:
        """Smallest integer > e/(p-1)."""
        return self.e // (self.p - 1) + 1

    @property
    def bottom(self) -> Fraction:
        return Fraction(self.precision_N, self.e)

    @property
    def digit_precision(self) -> tuple[int, ...]:
        """Exponent k_i with digit i known modulo p^k_i."""
        return tuple(max(0, ceil_div(self.precision_N - i, self.e)) for i in range(self.e))

    def with_precision(self, N: int) -> "RingSpec":
        return replace(self, precision_N=N)

    def same_field(self, other: "RingSpec") -> bool:
        return (self.p, self.e, self.eisenstein_poly) == (other.p, other.e, other.eisenstein_poly)

    def label(self) -> str:
        if self.e == 1:
            return f"Z_{self.p}/p^{self.precision_N}"
        return f"Z_{self.p}[π]/π^{self.precision_N} (e={self.e})"

    # ---- digit arithmetic ----
    def reduce(self, coeffs: Iterable[int]) -> Digits:
        return tuple(int(c) % m for c, m in zip(coeffs, self._moduli))

    def zero(self) -> Digits:
        return (0,) * self.e

    def one(self) -> Digits:
        return self.from_int(1)

    def from_int(self, n: int) -> Digits:
        return (n % self._moduli[0],) + (0,) * (self.e - 1)

    def pi(self) -> Digits:
        if self.e == 1:
            return self.from_int(self.p)
        return self.reduce((0, 1) + (0,) * (self.e - 2))

    def add(self, a: Digits, b: Digits) -> Digits:
        return tuple((x + y) % m for x, y, m in zip(a, b, self._moduli))

    def sub(self, a: Digits, b: Digits) -> Digits:
        return tuple((x - y) % m for x, y, m in zip(a, b, self._moduli))

    def neg(self, a: Digits) -> Digits:
        return tuple((-x) % m for x, m in zip(a, self._moduli))

    def scale(self, a: Digits, n: int) -> Digits:
        return tuple((x * n) % m for x, m in zip(a, self._moduli))

    def fold(self, conv: list[int]) -> list[int]:
        """Rewrite a polynomial in π of any degree as e digits using the Eisenstein relation."""
        e = self.e
        conv = list(conv)
        if len(conv) < e:
            conv += [0] * (e - len(conv))
        low = self.eisenstein_poly[:-1]
        for k in range(len(conv) - 1, e - 1, -1):
            t = conv[k]
            if t:
                conv[k] = 0
                for i, c in enumerate(low):
                    if c:
                        conv[k - e + i] -= t * c
        return conv[:e]

    def mul_raw(self, a: Digits, b: Digits) -> list[int]:
        if self.e == 1:
            return [a[0] * b[0]]
        conv = [0] * (2 * self.e - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    if y:
                        conv[i + j] += x * y
        return self.fold(conv)

    def mul(self, a: Digits, b: Digits) -> Digits:
        return self.reduce(self.mul_raw(a, b))

    def is_zero(self, a: Digits) -> bool:
        return not any(a)

    def valuation(self, a: Digits) -> Fraction:
        best = None
        for i, x in enumerate(a):
            if x:
                val = vp(x, self.p) + Fraction(i, self.e)
                if best is None or val < best:
                    best = val
        return self.bottom if best is None else best

    def unit_inverse_int(self, u: int) -> int:
        """Inverse of an integer unit modulo the largest digit modulus."""
        return pow(u, -1, self._moduli[0]) if self._moduli[0] > 1 else 0

    def divide_digits(self, a: Digits, s: int) -> Digits:
        """Exact division by p^s; the result lives in the ring with N - e·s digits."""
        if s == 0:
            return a
        q = self.p ** s
        if any(x % q for x in a):
            raise InsufficientPrecision(f"division by p^{s} is not exact", self.precision_N + self.e * s)
        return tuple(x // q for x in a)


# --------------- Scalars ---------------
@dataclass(frozen=True)
class PAdicScalar:
    ring: RingSpec
    coeffs: Digits

    @classmethod
    def of(cls, ring: RingSpec, value: Union[int, Sequence[int]]) -> "PAdicScalar":
        if isinstance(value, int):
            return cls(ring, ring.from_int(value))
        digits = list(value) + [0] * (ring.e - len(value))
        return cls(ring, ring.reduce(ring.fold(digits)))

    @classmethod
    def pi(cls, ring: RingSpec) -> "PAdicScalar":
        return cls(ring, ring.pi())

    def __add__(self, other: "PAdicScalar") -> "PAdicScalar":
        return PAdicScalar(self.ring, self.ring.add(self.coeffs, other.coeffs))

    def __sub__(self, other: "PAdicScalar") -> "PAdicScalar":
        return PAdicScalar(self.ring, self.ring.sub(self.coeffs, other.coeffs))

    def __neg__(self) -> "PAdicScalar":
        return PAdicScalar(self.ring, self.ring.neg(self.coeffs))

    def __mul__(self, other: Union["PAdicScalar", int]) -> "PAdicScalar":
        if isinstance(other, int):
            return PAdicScalar(self.ring, self.ring.scale(self.coeffs, other))
        return PAdicScalar(self.ring, self.ring.mul(self.coeffs, other.coeffs))

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "PAdicScalar":
        out = PAdicScalar(self.ring, self.ring.one())
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    @property
    def valuation(self) -> Fraction:
        return self.ring.valuation(self.coeffs)

    def is_zero(self) -> bool:
        return self.ring.is_zero(self.coeffs)

    def divide_p(self, s: int = 1) -> "PAdicScalar":
        ring = self.ring.with_precision(self.ring.N - self.ring.e * s)
        return PAdicScalar(ring, ring.reduce(self.ring.divide_digits(self.coeffs, s)))

    def with_ring(self, ring: RingSpec) -> "PAdicScalar":
        return PAdicScalar(ring, ring.reduce(self.coeffs))

    def __repr__(self) -> str:
        return f"PAdicScalar({list(self.coeffs)} mod π^{self.ring.N})"


# --------------- Matrices ---------------
@dataclass(frozen=True)
class PAdicMatrix:
    ring: RingSpec
    nrows: int
    ncols: int
    entries: tuple[Digits, ...]  # row-major

    @classmethod
    def from_rows(cls, ring: RingSpec, rows: Sequence[Sequence[Union[int, Sequence[int]]]]) -> "PAdicMatrix":
        nrows = len(rows)
        ncols = len(rows[0]) if nrows else 0
        entries = []
        for row in rows:
            if len(row) != ncols:
                raise ValueError("ragged matrix rows")
            for v in row:
                entries.append(PAdicScalar.of(ring, v).coeffs)
        return cls(ring, nrows, ncols, tuple(entries))

    @classmethod
    def zeros(cls, ring: RingSpec, nrows: int, ncols: int | None = None) -> "PAdicMatrix":
        ncols = nrows if ncols is None else ncols
        return cls(ring, nrows, ncols, (ring.zero(),) * (nrows * ncols))

    @classmethod
    def identity(cls, ring: RingSpec, n: int) -> "PAdicMatrix":
        one, zero = ring.one(), ring.zero()
        return cls(ring, n, n, tuple(one if i == j else zero for i in range(n) for j in range(n)))

    def get(self, i: int, j: int) -> Digits:
        return self.entries[i * self.ncols + j]

    def entry(self, i: int, j: int) -> PAdicScalar:
        return PAdicScalar(self.ring, self.get(i, j))

    def _check_shape(self, other: "PAdicMatrix") -> None:
        if (self.nrows, self.ncols) != (other.nrows, other.ncols):
            raise ValueError(f"shape mismatch {self.nrows}x{self.ncols} vs {other.nrows}x{other.ncols}")

    def __add__(self, other: "PAdicMatrix") -> "PAdicMatrix":
        self._check_shape(other)
        r = self.ring
        return PAdicMatrix(r, self.nrows, self.ncols, tuple(r.add(a, b) for a, b in zip(self.entries, other.entries)))

    def __sub__(self, other: "PAdicMatrix") -> "PAdicMatrix":
        self._check_shape(other)
        r = self.ring
        return PAdicMatrix(r, self.nrows, self.ncols, tuple(r.sub(a, b) for a, b in zip(self.entries, other.entries)))

    def __neg__(self) -> "PAdicMatrix":
        r = self.ring
        return PAdicMatrix(r, self.nrows, self.ncols, tuple(r.neg(a) for a in self.entries))

    def __matmul__(self, other: "PAdicMatrix") -> "PAdicMatrix":
        if self.ncols != other.nrows:
            raise ValueError("inner dimensions differ")
        r = self.ring
        n, m, k = self.nrows, other.ncols, self.ncols
        out = []
        if r.e == 1:
            mod = r.moduli[0]
            a = [x[0] for x in self.entries]
            b = [x[0] for x in other.entries]
            for i in range(n):
                row = a[i * k:(i + 1) * k]
                for j in range(m):
                    out.append((sum(row[t] * b[t * m + j] for t in range(k)) % mod,))
            return PAdicMatrix(r, n, m, tuple(out))
        for i in range(n):
            for j in range(m):
                acc = [0] * r.e
                for t in range(k):
                    x = self.entries[i * k + t]
                    y = other.entries[t * m + j]
                    if any(x) and any(y):
                        for d, c in enumerate(r.mul_raw(x, y)):
                            acc[d] += c
                out.append(r.reduce(acc))
        return PAdicMatrix(r, n, m, tuple(out))

    def scale(self, n: int) -> "PAdicMatrix":
        r = self.ring
        return PAdicMatrix(r, self.nrows, self.ncols, tuple(r.scale(a, n) for a in self.entries))

    def scale_by(self, s: PAdicScalar) -> "PAdicMatrix":
        r = self.ring
        return PAdicMatrix(r, self.nrows, self.ncols, tuple(r.mul(a, s.coeffs) for a in self.entries))

    def commutator(self, other: "PAdicMatrix") -> "PAdicMatrix":
        return self @ other - other @ self

    def transpose(self) -> "PAdicMatrix":
        return PAdicMatrix(self.ring, self.ncols, self.nrows,
                           tuple(self.get(i, j) for j in range(self.ncols) for i in range(self.nrows)))

    def is_zero(self) -> bool:
        return not any(any(a) for a in self.entries)

    def omega(self) -> Fraction:
        """Minimum entry valuation; the bottom value N/e for the zero matrix."""
        r = self.ring
        best = r.bottom
        for a in self.entries:
            if any(a):
                v = r.valuation(a)
                if v < best:
                    best = v
        return best

    def with_ring(self, ring: RingSpec) -> "PAdicMatrix":
        """Same integer representatives read in another precision of the same field."""
        if not ring.same_field(self.ring):
            raise ValueError("cannot move a matrix between different rings")
        return PAdicMatrix(ring, self.nrows, self.ncols, tuple(ring.reduce(a) for a in self.entries))

    def divide_int(self, m: int) -> "PAdicMatrix":
        """Exact division by the integer m; precision drops by e·v_p(m)."""
        r = self.ring
        s = vp(m, r.p)
        unit = m // r.p ** s
        low = r.with_precision(r.N - r.e * s) if s else r
        if low.N < 1:
            raise InsufficientPrecision(f"division by {m} consumes all digits", r.N + r.e * s)
        inv = low.unit_inverse_int(unit)
        out = tuple(low.scale(r.divide_digits(a, s), inv) for a in self.entries)
        return PAdicMatrix(low, self.nrows, self.ncols, out)

    def to_int_rows(self) -> list[list[int]]:
        """Entries as integers (valid for e = 1)."""
        if self.ring.e != 1:
            raise ValueError("integer rows only exist for e = 1")
        return [[self.get(i, j)[0] for j in range(self.ncols)] for i in range(self.nrows)]

    def __repr__(self) -> str:
        rows = []
        for i in range(self.nrows):
            cells = [str(self.get(i, j)[0]) if self.ring.e == 1 else str(list(self.get(i, j)))
                     for j in range(self.ncols)]
            rows.append("[" + ", ".join(cells) + "]")
        return f"PAdicMatrix({self.ring.label()}; " + ", ".join(rows) + ")"


# --------------- log / exp ---------------
def _lift_ring(ring: RingSpec, extra_digits: int) -> RingSpec:
    target = ring.N + extra_digits
    if target > config.MAX_PRECISION:
        raise InsufficientPrecision(
            f"series needs {extra_digits} headroom digits beyond N={ring.N}, over LAZARDLAB_MAX_PRECISION",
            target,
        )
    return ring.with_precision(target)


def _log_tail_vanishes(m: int, w: Fraction, target: Fraction, p: int) -> bool:
    # m·w - log_p(m) >= target  <=>  p^(m·w - target) >= m, compared without floats
    t = m * w - target
    if t < 0:
        return False
    return p ** t.numerator >= m ** t.denominator


def log_term_count(w: Fraction, ring: RingSpec) -> int:
    """Last index m whose log-series term can survive modulo π^N."""
    m = 2
    while not _log_tail_vanishes(m, w, ring.bottom, ring.p):
        m += 1
    return m - 1


def exp_term_count(w: Fraction, ring: RingSpec) -> int:
    gap = w - Fraction(1, ring.p - 1)
    m0 = math.ceil(ring.bottom / gap)
    return max(1, m0 - 1)


def _square_offset(A: PAdicMatrix) -> PAdicMatrix:
    if A.nrows != A.ncols:
        raise ValueError("matrix_log needs a square matrix")
    return A - PAdicMatrix.identity(A.ring, A.nrows)


def matrix_log(A: PAdicMatrix) -> PAdicMatrix:
    """log(A) = Σ (-1)^(m+1) (A-1)^m / m, for ω(A-1) > 1/(p-1)."""
    ring = A.ring
    X = _square_offset(A)
    if X.is_zero():
        return X
    w = X.omega()
    if w <= Fraction(1, ring.p - 1):
        raise ConvergenceError(f"ω(A-1) = {w} is not > 1/({ring.p}-1); log does not converge")
    M = log_term_count(w, ring)
    headroom = max(vp(m, ring.p) for m in range(1, M + 1))
    work = _lift_ring(ring, ring.e * headroom)
    Xh = X.with_ring(work)
    power = Xh
    total = PAdicMatrix.zeros(ring, A.nrows)
    for m in range(1, M + 1):
        term = power.divide_int(m).with_ring(ring)
        total = total + term if m % 2 else total - term
        if m < M:
            power = power @ Xh
    log.debug("[padic_core] log summed %d terms at N=%d (work N=%d)", M, ring.N, work.N)
    return total


def matrix_exp(X: PAdicMatrix) -> PAdicMatrix:
    """exp(X) = Σ X^m / m!, for ω(X) > 1/(p-1)."""
    ring = X.ring
    if X.nrows != X.ncols:
        raise ValueError("matrix_exp needs a square matrix")
    ident = PAdicMatrix.identity(ring, X.nrows)
    if X.is_zero():
        return ident
    w = X.omega()
    if w <= Fraction(1, ring.p - 1):
        raise ConvergenceError(f"ω(X) = {w} is not > 1/({ring.p}-1); exp does not converge")
    M = exp_term_count(w, ring)
    work = _lift_ring(ring, ring.e * legendre(M, ring.p))
    Xh = X.with_ring(work)
    power = Xh
    total = ident
    fact = 1
    for m in range(1, M + 1):
        fact *= m
        total = total + power.divide_int(fact).with_ring(ring)
        if m < M:
            power = power @ Xh
    return total


def scalar_log(x: PAdicScalar) -> PAdicScalar:
    """log of a principal unit, through the 1x1 matrix series."""
    one = PAdicMatrix(x.ring, 1, 1, (x.coeffs,))
    return PAdicScalar(x.ring, matrix_log(one).entries[0])


def random_matrix(ring: RingSpec, n: int, min_valuation: Fraction, rng) -> PAdicMatrix:
    """Random n×n matrix with every entry of valuation >= min_valuation."""
    shift = math.ceil(min_valuation * ring.e)
    entries = []
    for _ in range(n * n):
        digits = [0] * (ring.e + shift)
        for i in range(shift, shift + ring.e):
            digits[i] = rng.randrange(ring.p ** ring.digit_precision[0] or 1)
        entries.append(ring.reduce(ring.fold(digits)))
    return PAdicMatrix(ring, n, n, tuple(entries))
