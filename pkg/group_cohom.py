# group_cohom.py
# ------------------------------------------------------------
# Continuous cohomology through finite quotients.
# • Coefficients: Z/q-modules with a group action g -> matrix; the action
#   must factor through the quotient it is evaluated on
# • BarComplex: normalized inhomogeneous cochains on Q = G/G_{m/e},
#   applied in numpy batches or read row by row for lazy kernels
# • Inflation: pullback along Q_big -> Q_small
# • continuous_cohomology: images of H^n(Q_m) in H^n(Q_top), stopped when
#   two consecutive levels agree, certified by closed forms when known
# • group_cup: Alexander–Whitney product for trivial rank-1 coefficients
# ------------------------------------------------------------
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from math import comb
from typing import Callable, Optional

import numpy as np

import config
from errors import (BudgetExceeded, ConstructionError, HypothesisFailure,
                    InsufficientPrecision)
from filtered import FilteredGroup, find_ordered_basis
from pgroups import FiniteQuotient, finite_quotient
from snf_engine import (kernel_mod, lazy_kernel, prime_power, subquotient_divisors,
                        subquotient_from_kernel)

log = logging.getLogger("lazardlab.group_cohom")

APPLY_CHUNK_CELLS = 1 << 22
D_SQUARED_AUTO_CELLS = 200_000


# --------------- coefficients ---------------
class Coefficients:
    """(Z/q)^rank with g acting through action(g) (None: trivially)."""

    def __init__(self, modulus: int, rank: int = 1, action: Optional[Callable] = None, label: str = ""):
        prime_power(modulus)
        self.modulus = modulus
        self.rank = rank
        self.action = action
        self.label = label or (f"Z/{modulus}" if rank == 1 else f"(Z/{modulus})^{rank}") + \
            ("" if action is None else " with action")
        self._cache: dict[tuple[int, int], Optional[np.ndarray]] = {}

    @classmethod
    def trivial(cls, modulus: int, rank: int = 1) -> "Coefficients":
        return cls(modulus, rank)

    @property
    def is_trivial(self) -> bool:
        return self.action is None

    def matrix(self, x) -> np.ndarray:
        if self.action is None:
            return np.eye(self.rank, dtype=np.int64)
        return np.asarray(np.array(self.action(x), dtype=object) % self.modulus, dtype=np.int64)

    def on_quotient(self, Q: FiniteQuotient, pairs: int = 64, seed: int = 0) -> Optional[np.ndarray]:
        """Action matrices A[i] of every quotient element; HypothesisFailure if the action does not factor."""
        key = (id(Q.G), Q.m)
        if key in self._cache:
            return self._cache[key]
        if self.action is None:
            self._cache[key] = None
            return None
        G = Q.G
        ident = np.eye(self.rank, dtype=np.int64)
        for j in range(G.rank):
            t = int(Q.top[j])
            if t >= G.caps[j]:
                continue
            if (self.matrix(G.unit_element(j, t)) != ident).any():
                raise HypothesisFailure("action factors", f"G_{Q.nu} acts nontrivially on {self.label}")
        A = np.stack([self.matrix(Q.element(i)) for i in range(Q.order)])
        rng = np.random.default_rng(seed)
        I = rng.integers(0, Q.order, size=pairs)
        J = rng.integers(0, Q.order, size=pairs)
        lhs = A[Q.mul(I, J)]
        rhs = np.einsum("nab,nbc->nac", A[I], A[J]) % self.modulus
        if (lhs != rhs).any():
            raise HypothesisFailure("action factors", f"action on {self.label} is not a homomorphism on {Q.G.name}/level {Q.m}")
        self._cache[key] = A
        return A

    def trivial_mod(self, Q: FiniteQuotient) -> bool:
        A = self.on_quotient(Q)
        return A is None or not (A != np.eye(self.rank, dtype=np.int64)).any()


# --------------- bar complex ---------------
class BarComplex:
    """
    Normalized cochains f(g_1..g_n) in M, g_i != 1, flattened row-major over
    (g_1-1, ..., g_n-1, a). Differential:
      df(g_1..g_{n+1}) = g_1·f(g_2..) + Σ (-1)^i f(..g_i g_{i+1}..) + (-1)^{n+1} f(g_1..g_n)
    """

    def __init__(self, Q: FiniteQuotient, coeff: Coefficients, max_degree: int):
        self.Q = Q
        self.coeff = coeff
        self.q = coeff.modulus
        self.m = coeff.rank
        self.s = Q.order
        self.max_degree = max_degree
        cells = (self.s - 1) ** max_degree * self.m
        if cells > config.BAR_CAP:
            raise BudgetExceeded(f"bar cochains of degree {max_degree} on order {self.s}", config.BAR_CAP, cells)
        self.A = coeff.on_quotient(Q)
        self._merged: dict[tuple[int, int], np.ndarray] = {}
        for n in range(max_degree - 1):
            cells = (self.s - 1) ** (n + 2) * self.m
            if cells <= D_SQUARED_AUTO_CELLS:
                self.check_d_squared(n)
            else:
                log.info("[group_cohom] %s: d∘d check from degree %d skipped (%d cells > %d)",
                         self.label, n, cells, D_SQUARED_AUTO_CELLS)

    @property
    def label(self) -> str:
        return f"bar({self.Q.G.name}/level {self.Q.m}; {self.coeff.label})"

    def dim(self, n: int) -> int:
        return (self.s - 1) ** n * self.m if n >= 0 else 0

    def _shape(self, n: int) -> tuple[int, ...]:
        return (self.s - 1,) * n + (self.m,)

    def full(self, vecs: np.ndarray, n: int) -> np.ndarray:
        """(B, dim) -> (B, s, .., s, m) with zeros wherever an argument is the identity."""
        B = vecs.shape[0]
        F = vecs.reshape((B,) + self._shape(n))
        return np.pad(F, ((0, 0),) + ((1, 0),) * n + ((0, 0),))

    def _grid(self, n: int) -> list[np.ndarray]:
        return list(np.indices((self.s - 1,) * n) + 1) if n else []

    def _merged_index(self, n: int, i: int, grid: list[np.ndarray]) -> np.ndarray:
        key = (n, i)
        if key not in self._merged:
            self._merged[key] = self.Q.mul(grid[i - 1], grid[i])
        return self._merged[key]

    def apply(self, n: int, vecs) -> np.ndarray:
        """d^n on a batch of cochains (B, dim(n)) -> (B, dim(n+1))."""
        vecs = np.asarray(vecs, dtype=np.int64).reshape(-1, self.dim(n)) % self.q
        per = max(1, APPLY_CHUNK_CELLS // max(1, self.dim(n + 1)))
        if vecs.shape[0] > per:
            return np.concatenate([self.apply(n, vecs[i:i + per]) for i in range(0, vecs.shape[0], per)])
        B, q = vecs.shape[0], self.q
        F = self.full(vecs, n)
        grid = self._grid(n + 1)
        rest = (slice(None),) + tuple(grid[1:])
        inner = F[rest] if n else np.broadcast_to(F[:, None, :], (B, self.s - 1, self.m))
        if self.A is None:
            out = inner.copy()
        else:
            out = np.einsum("...ab,B...b->B...a", self.A[grid[0]], inner) % q
        for i in range(1, n + 1):
            args = grid[:i - 1] + [self._merged_index(n + 1, i, grid)] + grid[i + 1:]
            term = F[(slice(None),) + tuple(args)]
            out = out + term if i % 2 == 0 else out - term
        last = F[(slice(None),) + tuple(grid[:n])] if n else inner
        out = out + last if (n + 1) % 2 == 0 else out - last
        return (out % q).reshape(B, -1)

    def _ravel(self, gs: list[np.ndarray], a: np.ndarray, n: int) -> np.ndarray:
        return np.ravel_multi_index(tuple(g - 1 for g in gs) + (a,), self._shape(n))

    def rows(self, n: int, ids) -> np.ndarray:
        """Rows ids of the matrix of d^n (each row index encodes (g_1..g_{n+1}, a))."""
        ids = np.asarray(ids, dtype=np.int64)
        L = ids.size
        out = np.zeros((L, self.dim(n)), dtype=np.int64)
        if L == 0:
            return out
        parts = np.unravel_index(ids, self._shape(n + 1))
        gs = [g + 1 for g in parts[:-1]]
        a = parts[-1]
        r = np.arange(L)
        for b in range(self.m):
            col = self._ravel(gs[1:], np.full(L, b), n)
            if self.A is None:
                val = (a == b).astype(np.int64)
            else:
                val = self.A[gs[0], a, b]
            np.add.at(out, (r, col), val)
        for i in range(1, n + 1):
            merged = self.Q.mul(gs[i - 1], gs[i])
            ok = merged != 0
            if ok.any():
                sel = [g[ok] for g in gs[:i - 1]] + [merged[ok]] + [g[ok] for g in gs[i + 1:]]
                np.add.at(out, (r[ok], self._ravel(sel, a[ok], n)), (-1) ** i)
        np.add.at(out, (r, self._ravel(gs[:n], a, n)), (-1) ** (n + 1))
        return out % self.q

    def matrix(self, n: int) -> np.ndarray:
        cells = self.dim(n + 1) * self.dim(n)
        if cells > config.BAR_CAP:
            raise BudgetExceeded(f"dense d^{n} on {self.label}", config.BAR_CAP, cells)
        return self.rows(n, np.arange(self.dim(n + 1)))

    def random_cochains(self, n: int, count: int, seed: int = 0) -> np.ndarray:
        rng = np.random.default_rng(seed)
        return rng.integers(0, self.q, size=(count, self.dim(n)), dtype=np.int64)

    def check_d_squared(self, n: int, samples: int = 3, seed: int = 0) -> None:
        f = self.random_cochains(n, samples, seed)
        dd = self.apply(n + 1, self.apply(n, f))
        if dd.any():
            r, c = np.argwhere(dd)[0]
            raise ConstructionError(f"{self.label}: d∘d != 0 from degree {n} at cochain {r}, entry {c}")

    def kernel(self, n: int, seed: int = 0) -> np.ndarray:
        """Generators (rows) of the n-cocycles."""
        ncols, nrows = self.dim(n), self.dim(n + 1)
        if nrows * ncols <= config.BAR_CAP:
            return kernel_mod(self.matrix(n), self.q, ncols)

        def violated(K):
            bad = np.zeros(nrows, dtype=bool)
            step = max(1, APPLY_CHUNK_CELLS // max(1, nrows))
            for i in range(0, K.shape[0], step):
                bad |= self.apply(n, K[i:i + step]).any(axis=0)
            return np.nonzero(bad)[0]

        return lazy_kernel(ncols, lambda idx: self.rows(n, idx), violated, nrows, self.q, seed)

    def is_cocycle(self, n: int, vec) -> bool:
        return not self.apply(n, vec).any()


def bar_complex(Q: FiniteQuotient, M: Coefficients, max_degree: int) -> BarComplex:
    return BarComplex(Q, M, max_degree)


# --------------- inflation ---------------
class Inflation:
    """Pullback of cochains along the canonical surjection Q_big -> Q_small."""

    def __init__(self, small: BarComplex, big: BarComplex):
        if small.Q.G is not big.Q.G or small.Q.m > big.Q.m:
            raise ValueError("inflation needs quotients of the same group with small.level <= big.level")
        if (small.q, small.m) != (big.q, big.m):
            raise ValueError("inflation needs the same coefficient module on both levels")
        self.small = small
        self.big = big
        self.proj = big.Q.projection_to(small.Q)
        if small.A is not None and (big.A != small.A[self.proj]).any():
            raise ValueError("coefficient actions on the two levels are not compatible")

    def columns(self, n: int, ids) -> np.ndarray:
        """Small-level cochain index read by big-level index ids; -1 where an argument maps to 1."""
        parts = np.unravel_index(np.asarray(ids, dtype=np.int64), self.big._shape(n))
        gs = [self.proj[g + 1] for g in parts[:-1]]
        bad = np.zeros(parts[-1].shape, dtype=bool)
        for g in gs:
            bad |= g == 0
        safe = [np.where(bad, 1, g) for g in gs]
        cols = self.small._ravel(safe, parts[-1], n)
        return np.where(bad, -1, cols)

    def apply(self, n: int, vecs) -> np.ndarray:
        vecs = np.asarray(vecs, dtype=np.int64).reshape(-1, self.small.dim(n))
        if n == 0:
            return vecs.copy()
        F = self.small.full(vecs, n)
        P = self.proj[1:]
        ix = np.ix_(*([P] * n))
        out = F[(slice(None),) + ix + (slice(None),)]
        return out.reshape(vecs.shape[0], -1)

    def matrix(self, n: int) -> np.ndarray:
        cols = self.columns(n, np.arange(self.big.dim(n)))
        M = np.zeros((self.big.dim(n), self.small.dim(n)), dtype=np.int64)
        ok = cols >= 0
        M[np.nonzero(ok)[0], cols[ok]] = 1
        return M

    def check_commutes(self, n: int, samples: int = 2, seed: int = 0) -> bool:
        f = self.small.random_cochains(n, samples, seed)
        lhs = self.big.apply(n, self.apply(n, f))
        rhs = self.apply(n + 1, self.small.apply(n, f))
        return bool((lhs == rhs).all())


def inflation(small: BarComplex, big: BarComplex) -> Inflation:
    return Inflation(small, big)


# --------------- classes modulo coboundaries ---------------
def classes_in(big: BarComplex, n: int, cocycles: np.ndarray, infl: Optional[Inflation] = None,
               seed: int = 0) -> list[int]:
    """
    Divisors of (span of the cocycles + B^n) / B^n inside the big complex.
    cocycles are rows over the small complex of infl (or over big itself).
    """
    q = big.q
    Z = np.asarray(cocycles, dtype=np.int64) % q
    a = Z.shape[0]
    if a == 0:
        return []
    b = big.dim(n - 1) if n > 0 else 0
    nrows = big.dim(n)

    def g_rows(idx):
        if infl is None:
            return Z[:, idx].T
        cols = infl.columns(n, idx)
        out = Z[:, np.where(cols >= 0, cols, 0)].T.copy()
        out[cols < 0] = 0
        return out

    def s_rows(idx):
        if b == 0:
            return np.zeros((len(idx), 0), dtype=np.int64)
        return big.rows(n - 1, idx)

    if (a + b) * nrows <= config.BAR_CAP:
        idx = np.arange(nrows)
        return subquotient_divisors(g_rows(idx), s_rows(idx) if b else None, q)

    def block(idx):
        return np.concatenate([g_rows(idx), (-s_rows(idx)) % q], axis=1)

    def violated(K):
        bad = np.zeros(nrows, dtype=bool)
        step = max(1, APPLY_CHUNK_CELLS // max(1, nrows))
        for i in range(0, K.shape[0], step):
            Ka, Kb = K[i:i + step, :a], K[i:i + step, a:]
            small_vals = (Ka @ Z) % q
            lhs = infl.apply(n, small_vals) if infl is not None else small_vals
            rhs = big.apply(n - 1, Kb) if b else 0
            bad |= ((lhs - rhs) % q).any(axis=0)
        return np.nonzero(bad)[0]

    K = lazy_kernel(a + b, block, violated, nrows, q, seed)
    return subquotient_from_kernel(K, a, q)


def level_cohomology(B: BarComplex, n: int, seed: int = 0) -> list[int]:
    """H^n(Q, M) of the finite quotient itself."""
    return classes_in(B, n, B.kernel(n, seed), None, seed)


def is_coboundary(B: BarComplex, n: int, c) -> bool:
    c = np.asarray(c, dtype=np.int64).reshape(1, -1) % B.q
    if not c.any():
        return True
    return not classes_in(B, n, c)


# --------------- cup products ---------------
def group_cup(B: BarComplex, a, deg_a: int, b, deg_b: int) -> np.ndarray:
    """(a ∪ b)(g_1..g_{p+r}) = a(g_1..g_p)·b(g_{p+1}..g_{p+r}) for trivial rank-1 coefficients."""
    if B.m != 1 or B.A is not None:
        raise ValueError("group_cup is implemented for trivial rank-1 coefficients")
    a = np.asarray(a, dtype=np.int64).reshape(1, -1)
    b = np.asarray(b, dtype=np.int64).reshape(1, -1)
    if not B.is_cocycle(deg_a, a) or not B.is_cocycle(deg_b, b):
        raise ValueError("group_cup needs cocycle inputs")
    cells = B.dim(deg_a + deg_b)
    if cells > config.BAR_CAP:
        raise BudgetExceeded("cup product cochain", config.BAR_CAP, cells)
    out = np.multiply.outer(a.reshape(-1), b.reshape(-1)) % B.q
    return out.reshape(-1)


# --------------- stabilization ---------------
@dataclass(frozen=True)
class StableDegree:
    degree: int
    divisors: tuple[int, ...]
    level: int
    top: int
    stabilized: bool
    certified: bool
    expected: Optional[tuple[int, ...]] = None
    images: tuple[tuple[int, tuple[int, ...]], ...] = ()

    @property
    def mod_p_dim(self) -> int:
        return len(self.divisors)

    def to_dict(self) -> dict:
        return {"i": self.degree, "divisors": list(self.divisors), "level": self.level, "top": self.top,
                "stabilized": self.stabilized, "certified": self.certified,
                "expected": None if self.expected is None else list(self.expected),
                "images": {str(m): list(d) for m, d in self.images}}


@dataclass(frozen=True)
class StabilizedCohomology:
    group: str
    p: int
    modulus: int
    coefficients: str
    degrees: tuple[StableDegree, ...] = field(default_factory=tuple)

    @property
    def certified(self) -> bool:
        return all(d.certified for d in self.degrees)

    @property
    def stabilization_level(self) -> Optional[int]:
        levels = [d.level for d in self.degrees if d.stabilized]
        return max(levels) if levels else None

    def dims(self) -> list[int]:
        return [d.mod_p_dim for d in self.degrees]

    def divisors(self, n: int) -> list[int]:
        return list(self.degrees[n].divisors)

    def to_dict(self) -> dict:
        return {"side": "group", "group": self.group, "p": self.p, "modulus": self.modulus,
                "coefficients": self.coefficients, "certified": self.certified,
                "stabilization_level": self.stabilization_level,
                "degrees": [d.to_dict() for d in self.degrees]}


def _is_abelian(G: FilteredGroup) -> bool:
    basis = find_ordered_basis(G)
    xs = basis.elements
    return all(G.is_trivial(G.commutator(x, y)) for i, x in enumerate(xs) for y in xs[i + 1:])


def closed_form(G: FilteredGroup, coeff: Coefficients, Q0: FiniteQuotient, n: int) -> Optional[tuple[int, ...]]:
    """Known answer: abelian G with trivial action, or trivial action mod p on an equi-p-valued G."""
    if not coeff.trivial_mod(Q0):
        return None
    d = G.rank
    count = comb(d, n) * coeff.rank
    if _is_abelian(G):
        return (coeff.modulus,) * count
    if coeff.modulus == G.p and find_ordered_basis(G).equi_p_valued:
        return (G.p,) * count
    return None


def _first_level(G: FilteredGroup, coeff: Coefficients) -> int:
    m = int(G.nu0 * G.e) + 1
    while True:
        Q = finite_quotient(G, m)
        try:
            coeff.on_quotient(Q)
            return m
        except HypothesisFailure as e:
            log.info("[group_cohom] level %d: %s; raising the level", m, e)
            m += 1


def _quotients(G: FilteredGroup, start: int) -> dict[int, FiniteQuotient]:
    out = {}
    m = start
    while len(out) < config.LEVEL_BUDGET + 1:
        try:
            out[m] = finite_quotient(G, m)
        except (BudgetExceeded, InsufficientPrecision):
            break
        m += 1
    return out


def continuous_cohomology(G: FilteredGroup, coeff: Coefficients, max_degree: int,
                          seed: Optional[int] = None) -> StabilizedCohomology:
    seed = config.DEFAULT_SEED if seed is None else seed
    m0 = _first_level(G, coeff)
    quotients = _quotients(G, m0)
    if not quotients:
        raise BudgetExceeded(f"first quotient of {G.name}", config.QUOTIENT_CAP)
    complexes: dict[int, BarComplex] = {}

    def bar(m: int, n: int) -> BarComplex:
        if m not in complexes or complexes[m].max_degree < n:
            complexes[m] = BarComplex(quotients[m], coeff, n)
        return complexes[m]

    degrees = []
    for n in range(max_degree + 1):
        degrees.append(_stable_degree(G, coeff, quotients, bar, n, seed))
    result = StabilizedCohomology(G.name, G.p, coeff.modulus, coeff.label, tuple(degrees))
    log.info("[group_cohom] %s with %s: divisors %s (certified=%s)", G.name, coeff.label,
             [list(d.divisors) for d in degrees], result.certified)
    return result


def _feasible(Q: FiniteQuotient, coeff: Coefficients, n: int) -> bool:
    cols = (Q.order - 1) ** n * coeff.rank
    rows = (Q.order - 1) ** (n + 1) * coeff.rank
    return cols <= config.KERNEL_COLUMN_CAP and rows <= config.BAR_CAP


def _stable_degree(G, coeff, quotients, bar, n: int, seed: int) -> StableDegree:
    levels = sorted(quotients)
    m0 = levels[0]
    expected = closed_form(G, coeff, quotients[m0], n)
    if n == 0:
        B = bar(m0, 1)
        divs = tuple(level_cohomology(B, 0, seed))
        return StableDegree(0, divs, m0, m0, True, expected is None or divs == expected, expected,
                            ((m0, divs),))
    full = [m for m in levels if _feasible(quotients[m], coeff, n)][:config.LEVEL_BUDGET]
    if not full:
        raise BudgetExceeded(f"degree-{n} cocycles of {G.name}", config.KERNEL_COLUMN_CAP)
    top = full[-1]
    if n >= 2:
        nxt = top + 1
        if nxt in quotients and (quotients[nxt].order - 1) ** n * coeff.rank <= config.BAR_CAP \
                and (quotients[nxt].order - 1) ** (n - 1) * coeff.rank <= config.KERNEL_COLUMN_CAP:
            top = nxt
    images: list[tuple[int, tuple[int, ...]]] = []
    chosen, stabilized = None, False
    for m in full:
        try:
            divs = _image(bar, m, top if n >= 2 else m, n, seed)
        except BudgetExceeded as e:
            log.info("[group_cohom] degree %d stops at level %d: %s", n, m, e)
            break
        images.append((m, divs))
        if len(images) >= 2 and images[-2][1] == divs:
            chosen, stabilized = images[-2], True
            break
    if not images:
        raise BudgetExceeded(f"degree-{n} images for {G.name}", config.KERNEL_COLUMN_CAP)
    if chosen is None:
        chosen = images[-1]
        log.warning("[group_cohom] %s: degree %d did not stabilize within levels %s", G.name, n, full)
    certified = expected is not None and chosen[1] == expected
    return StableDegree(n, chosen[1], chosen[0], top if n >= 2 else chosen[0], stabilized, certified,
                        expected, tuple(images))


def _image(bar, m: int, top: int, n: int, seed: int) -> tuple[int, ...]:
    small = bar(m, n + 1)
    Z = small.kernel(n, seed)
    if top == m:
        return tuple(classes_in(small, n, Z, None, seed))
    big = bar(top, n)
    infl = Inflation(small, big)
    if not infl.check_commutes(n - 1, seed=seed):
        raise ConstructionError(f"inflation from level {m} to {top} does not commute with d")
    return tuple(classes_in(big, n, Z, infl, seed))
