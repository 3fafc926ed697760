# lie_cohom.py
# ------------------------------------------------------------
# Chevalley–Eilenberg cohomology of a LieLattice.
# • CEComplex: Λ^n(L^∨) ⊗ M with the Koszul-signed differential, over
#   Z/p^k or over Z (modulus None, trivial coefficients)
# • cohomology: elementary divisors per degree plus the mod-p count,
#   cross-checked against an independent mod-p rank computation
# • cup_product / is_coboundary / exterior_span: the wedge product
# • rational_betti / is_minimal_mod_p: torsion and minimality checks
# ------------------------------------------------------------
from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from itertools import combinations
from math import comb
from typing import Optional, Sequence

import numpy as np

import config
from errors import ConstructionError
from lazard_lie import LieLattice, LieModule
from padic_core import vp
from snf_engine import (homology_divisors, kernel_mod, prime_power, rank_mod_p, snf, solve_mod)

log = logging.getLogger("lazardlab.lie_cohom")


def _insert_sign(k: int, rest: Sequence[int]) -> tuple[int, Optional[tuple[int, ...]]]:
    """Sign and sorted index set of e_k ∧ e_rest; (0, None) when k repeats."""
    if k in rest:
        return 0, None
    pos = sum(1 for r in rest if r < k)
    merged = tuple(sorted((k, *rest)))
    return (-1) ** pos, merged


def shuffle_sign(I: Sequence[int], J: Sequence[int]) -> int:
    inversions = sum(1 for i in I for j in J if i > j)
    return -1 if inversions % 2 else 1


# --------------- the complex ---------------
class CEComplex:
    """
    Cochains f_I ⊗ v_a for increasing multi-indices I and module basis v_a,
    flattened as index(I)·m + a. Differentials are exact integer matrices
    (object dtype) reduced modulo q when a modulus is set.
    """

    def __init__(self, L: LieLattice, M: Optional[LieModule] = None, modulus: Optional[int] = None):
        if M is not None:
            if modulus is not None and modulus != M.modulus:
                raise ValueError(f"module modulus {M.modulus} differs from complex modulus {modulus}")
            modulus = M.modulus
        if modulus is not None:
            prime_power(modulus)
            if L.p is not None and prime_power(modulus)[0] != L.p:
                raise ValueError(f"modulus {modulus} is not a power of p={L.p}")
            L = L.reduce(modulus) if L.modulus is not None else L
        elif L.modulus is not None:
            raise ValueError("an exact complex needs an exact lattice")
        self.L = L
        self.d = L.rank
        self.modulus = modulus
        self.p = L.p if L.p is not None else prime_power(modulus)[0]
        self.M = M
        self.m = M.rank if M is not None else 1
        self.bases = [list(combinations(range(self.d), n)) for n in range(self.d + 1)]
        self.index = [{I: t for t, I in enumerate(b)} for b in self.bases]
        self._differentials = [self._build(n) for n in range(self.d)]
        self.check_d_squared()

    @property
    def label(self) -> str:
        coeff = self.M.label if self.M is not None else ("Z" if self.modulus is None else f"Z/{self.modulus}")
        return f"CE({self.L.provenance or 'lattice'}; {coeff})"

    def dim(self, n: int) -> int:
        if n < 0 or n > self.d:
            return 0
        return comb(self.d, n) * self.m

    def differential(self, n: int) -> np.ndarray:
        """d^n : C^n -> C^{n+1} as a dim(n+1) x dim(n) matrix; empty outside 0..d-1."""
        if 0 <= n < self.d:
            return self._differentials[n]
        return np.zeros((self.dim(n + 1), self.dim(n)), dtype=object)

    def _reduce(self, A):
        return A % self.modulus if self.modulus is not None else A

    def _build(self, n: int) -> np.ndarray:
        m = self.m
        c = self.L.structure()
        acts = self.M.actions if self.M is not None else None
        D = np.zeros((self.dim(n + 1), self.dim(n)), dtype=object)
        for J in self.bases[n + 1]:
            row = self.index[n + 1][J] * m
            # bracket terms
            for s, t in combinations(range(n + 1), 2):
                rest = tuple(x for u, x in enumerate(J) if u not in (s, t))
                sign_st = (-1) ** (s + t)
                for k in range(self.d):
                    ck = c[J[s], J[t], k]
                    if not ck:
                        continue
                    sign, I = _insert_sign(k, rest)
                    if not sign:
                        continue
                    col = self.index[n][I] * m
                    for b in range(m):
                        D[row + b, col + b] += sign_st * sign * ck
            # action terms
            if acts is not None:
                for s in range(n + 1):
                    I = J[:s] + J[s + 1:]
                    col = self.index[n][I] * m
                    A = acts[J[s]]
                    sign = (-1) ** s
                    for b in range(m):
                        for a in range(m):
                            if A[b, a]:
                                D[row + b, col + a] += sign * int(A[b, a])
        return self._reduce(D)

    def check_d_squared(self) -> None:
        for n in range(self.d - 1):
            prod = self._reduce(self._differentials[n + 1].dot(self._differentials[n]))
            bad = np.argwhere(prod != 0)
            if bad.size:
                i, j = bad[0]
                raise ConstructionError(f"{self.label}: d∘d != 0 in degree {n}, entry ({i},{j}) = {prod[i, j]}")

    # ---- cochain helpers ----
    def cochain(self, values: dict[tuple[int, ...], int], n: int) -> np.ndarray:
        """Rank-1 cochain from {I: value}; I is sorted automatically with its sign."""
        vec = np.zeros(self.dim(n), dtype=object)
        for I, v in values.items():
            if len(set(I)) < len(I):
                continue
            order = sorted(range(len(I)), key=lambda t: I[t])
            inv = sum(1 for a in range(len(order)) for b in range(a + 1, len(order)) if order[a] > order[b])
            vec[self.index[n][tuple(sorted(I))] * self.m] += (-1) ** inv * v
        return self._reduce(vec)

    def apply(self, n: int, vec) -> np.ndarray:
        return self._reduce(self.differential(n).dot(np.asarray(vec, dtype=object)))

    def is_cocycle(self, n: int, vec) -> bool:
        return not any(int(x) for x in self.apply(n, vec))


def ce_complex(L: LieLattice, M: Optional[LieModule] = None, modulus: Optional[int] = None) -> CEComplex:
    return CEComplex(L, M, modulus)


# --------------- cohomology ---------------
@dataclass(frozen=True)
class DegreeCohomology:
    degree: int
    divisors: tuple[int, ...]
    free_rank: int
    mod_p_dim: int

    def to_dict(self) -> dict:
        return {"i": self.degree, "divisors": list(self.divisors), "free_rank": self.free_rank,
                "mod_p_dim": self.mod_p_dim}


@dataclass(frozen=True)
class CohomReport:
    """Divisors list cyclic summands: q (or 0 over Z) marks a free summand."""
    p: int
    k: Optional[int]
    modulus: Optional[int]
    degrees: tuple[DegreeCohomology, ...]
    coefficients: str = ""
    source: str = ""
    side: str = "lie"

    def dims(self) -> list[int]:
        return [d.mod_p_dim for d in self.degrees]

    def divisors(self, n: int) -> list[int]:
        return list(self.degrees[n].divisors)

    def to_dict(self) -> dict:
        return {"side": self.side, "p": self.p, "k": self.k, "modulus": self.modulus,
                "coefficients": self.coefficients, "source": self.source,
                "degrees": [d.to_dict() for d in self.degrees]}


def truncate_divisors(divisors: Sequence[int], q: int) -> list[int]:
    """Divisors of the same complex read modulo q = p^k from those modulo p^(k+j)."""
    return sorted(min(int(d), q) for d in divisors)


def _p_part(d: int, p: int) -> int:
    return p ** vp(d, p) if d else 0


def _degree_mod_q(C: CEComplex, n: int) -> DegreeCohomology:
    q = C.modulus
    dim = C.dim(n)
    d_in = C.differential(n - 1) if n > 0 else None
    d_out = C.differential(n) if n < C.d else None
    divisors = homology_divisors(d_in, d_out, q, dim)
    ranks = [rank_mod_p(D, C.p) if D is not None and D.size else 0 for D in (d_in, d_out)]
    independent = dim - ranks[0] - ranks[1]
    if independent != len(divisors):
        raise ConstructionError(
            f"{C.label}: degree {n} has {len(divisors)} cyclic summands but mod-p dimension {independent}")
    return DegreeCohomology(n, tuple(divisors), sum(1 for d in divisors if d == q), len(divisors))


def _degree_exact(C: CEComplex, n: int) -> DegreeCohomology:
    dim = C.dim(n)
    p = C.p
    d_in, d_out = C.differential(n - 1), C.differential(n)
    ranks, torsion = [], []
    for D in (d_in, d_out):
        res = snf(D, 0) if D.size else None
        ranks.append(sum(1 for x in res.divisors if x) if res else 0)
        if D is d_in and res is not None:
            # ker(d_out) is saturated, so the torsion of H^n is that of C^n / im(d_in)
            torsion = sorted(t for t in (_p_part(int(x), p) for x in res.divisors if x) if t > 1)
    free = dim - ranks[0] - ranks[1]
    mod_p = dim - sum(rank_mod_p(D, p) if D.size else 0 for D in (d_in, d_out))
    return DegreeCohomology(n, tuple(torsion + [0] * free), free, mod_p)


def cohomology(C: CEComplex, workers: Optional[int] = None) -> CohomReport:
    """H^n for n = 0..d, one degree per worker."""
    run = _degree_exact if C.modulus is None else _degree_mod_q
    with ThreadPoolExecutor(max_workers=workers or config.WORKERS) as pool:
        degrees = tuple(pool.map(lambda n: run(C, n), range(C.d + 1)))
    k = prime_power(C.modulus)[1] if C.modulus is not None else None
    coeff = C.M.label if C.M is not None else ("Z" if C.modulus is None else f"Z/{C.modulus}")
    report = CohomReport(C.p, k, C.modulus, degrees, coeff, C.L.provenance)
    log.info("[lie_cohom] %s: divisors %s", C.label, [list(d.divisors) for d in degrees])
    return report


def rational_betti(C: CEComplex) -> list[int]:
    """Q_p-Betti numbers; modulo p^k a differential entry divisible by p^k counts as zero."""
    def rank(D):
        if D.size == 0:
            return 0
        res = snf(D, C.modulus or 0)
        zero = C.modulus if C.modulus is not None else 0
        return sum(1 for x in res.divisors if x != zero)
    ranks = [rank(C.differential(n)) for n in range(C.d + 1)]
    return [C.dim(n) - ranks[n] - (ranks[n - 1] if n else 0) for n in range(C.d + 1)]


def is_minimal_mod_p(C: CEComplex) -> bool:
    return all(not (C.differential(n) % C.p).any() for n in range(C.d))


# --------------- products ---------------
def _require_scalar(C: CEComplex) -> None:
    if C.m != 1 or (C.M is not None and not C.M.is_trivial()):
        raise ValueError("cup products are implemented for trivial rank-1 coefficients")


def wedge(C: CEComplex, a, deg_a: int, b, deg_b: int) -> np.ndarray:
    """(a ∧ b)(e_K) = Σ over shuffles K = I ⊔ J of sign(I, J)·a(I)·b(J)."""
    _require_scalar(C)
    a = np.asarray(a, dtype=object)
    b = np.asarray(b, dtype=object)
    n = deg_a + deg_b
    out = np.zeros(C.dim(n), dtype=object)
    if n > C.d:
        return out
    for K in C.bases[n]:
        total = 0
        for I in combinations(K, deg_a):
            J = tuple(x for x in K if x not in I)
            total += shuffle_sign(I, J) * a[C.index[deg_a][I]] * b[C.index[deg_b][J]]
        out[C.index[n][K]] = total
    return C._reduce(out)


def cup_product(C: CEComplex, a, deg_a: int, b, deg_b: int) -> np.ndarray:
    _require_scalar(C)
    if not C.is_cocycle(deg_a, a) or not C.is_cocycle(deg_b, b):
        raise ValueError("cup_product needs cocycle inputs")
    return wedge(C, a, deg_a, b, deg_b)


def is_coboundary(C: CEComplex, n: int, c) -> bool:
    if C.modulus is None:
        raise ValueError("is_coboundary needs a finite modulus")
    c = np.asarray(c, dtype=object) % C.modulus
    if not c.any():
        return True
    if n == 0:
        return False
    try:
        solve_mod(C.differential(n - 1), c, C.modulus)
    except ConstructionError:
        return False
    return True


@dataclass(frozen=True)
class ExteriorSpan:
    degree: int
    spanned: int
    dimension: int
    expected: int

    @property
    def exterior(self) -> bool:
        return self.spanned == self.dimension == self.expected


def exterior_span(C: CEComplex) -> list[ExteriorSpan]:
    """How much of H^n mod p the wedge products of degree-1 classes reach."""
    _require_scalar(C)
    if C.modulus != C.p:
        raise ValueError("exterior_span works modulo p")
    p = C.p
    Z1 = kernel_mod(C.differential(1), p, C.dim(1))
    h1 = Z1.shape[0]
    report = cohomology(C)
    out = []
    for n in range(C.d + 1):
        boundaries = C.differential(n - 1).T if n > 0 else np.zeros((0, C.dim(n)), dtype=object)
        if n == 0:
            products = [np.ones(1, dtype=object)]
        else:
            products = []
            for tup in combinations(range(h1), n):
                vec, deg = Z1[tup[0]].astype(object), 1
                for t in tup[1:]:
                    vec = cup_product(C, vec, deg, Z1[t].astype(object), 1)
                    deg += 1
                products.append(vec)
        rows_b = [list(r) for r in boundaries] if boundaries.size else []
        base = rank_mod_p(rows_b, p) if rows_b else 0
        stacked = rows_b + [list(v) for v in products]
        spanned = (rank_mod_p(stacked, p) if stacked else 0) - base
        out.append(ExteriorSpan(n, spanned, report.degrees[n].mod_p_dim, comb(h1, n)))
    return out
