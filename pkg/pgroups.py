# pgroups.py
# ------------------------------------------------------------
# Matrix congruence groups 1 + π^r Λ ⊂ GL_n(R) and what is computed on them.
# • MatrixGroupSpec / build_group: full, unipotent, diagonal and quaternion shapes,
#   standard (min entry valuation) or weil (Z_p-coordinate) filtration
# • FiniteQuotient: G / G_{m/e} as an indexed finite p-group (numpy batches)
# • lower_p_series / check_uniform: sifting in gr coordinates below a cutoff
# • renormalize_valuation: ω' = ω + 1 - t for equi-p-valued groups
# • group spec text format (key = value)
# ------------------------------------------------------------
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from functools import cached_property
from pathlib import Path
from typing import Optional, Sequence

import numpy as np
import sympy

import config
from errors import BudgetExceeded, ConstructionError, InsufficientPrecision
from filtered import FilteredGroup, ScaledFiltration, find_ordered_basis
from padic_core import PAdicMatrix, RingSpec

log = logging.getLogger("lazardlab.pgroups")

SHAPES = ("full", "unipotent", "diagonal", "quaternion")
FILTRATIONS = ("standard", "weil")


# --------------- specs ---------------
@dataclass(frozen=True)
class MatrixGroupSpec:
    ring: RingSpec
    n: int
    level: int
    shape: str = "full"
    filtration: str = "standard"
    fixture_tag: str = ""

    def __post_init__(self):
        problems = []
        if self.n < 1:
            problems.append(f"matrix size n={self.n} < 1")
        if self.level < 1:
            problems.append(f"level={self.level} < 1")
        if self.shape not in SHAPES:
            problems.append(f"shape '{self.shape}' not in {SHAPES}")
        if self.filtration not in FILTRATIONS:
            problems.append(f"filtration '{self.filtration}' not in {FILTRATIONS}")
        if self.filtration == "weil" and self.level % self.ring.e:
            problems.append(f"weil filtration needs level divisible by e={self.ring.e}")
        if self.shape == "quaternion":
            if self.n != 2 or self.ring.e != 2 or self.ring.eisenstein_poly != (-self.ring.p, 0, 1):
                problems.append("quaternion shape needs n=2 over Z_p[π] with π² = p")
            if self.filtration != "standard":
                problems.append("quaternion shape only carries the standard filtration")
        if problems:
            raise ValueError("Invalid MatrixGroupSpec: " + ", ".join(problems))

    @classmethod
    def from_fixture(cls, name: str, precision: Optional[int] = None) -> "MatrixGroupSpec":
        fx = config.get_group_fixture(name)
        return cls.from_mapping(fx, precision)

    @classmethod
    def from_mapping(cls, fx: dict, precision: Optional[int] = None) -> "MatrixGroupSpec":
        ring = RingSpec(p=int(fx["p"]), e=int(fx.get("e", 1)),
                        eisenstein_poly=tuple(int(c) for c in fx.get("eisenstein", fx.get("eisenstein_poly", ())) or ()),
                        precision_N=int(precision or fx.get("precision_N") or config.DEFAULT_PRECISION))
        return cls(ring, int(fx.get("n", 1)), int(fx.get("level", 1)), fx.get("shape", "full"),
                   fx.get("filtration", "standard"), fx.get("fixture_tag", ""))

    def with_precision(self, N: int) -> "MatrixGroupSpec":
        return replace(self, ring=self.ring.with_precision(N))

    def label(self) -> str:
        tag = f", {self.fixture_tag}" if self.fixture_tag else ""
        return f"1+π^{self.level}·{self.shape}(n={self.n}) over {self.ring.label()} [{self.filtration}{tag}]"


def smallest_nonresidue(p: int) -> int:
    for c in range(2, p):
        if not sympy.is_quad_residue(c, p):
            return c
    raise ValueError(f"no quadratic non-residue modulo {p}")


# --------------- the group ---------------
class MatrixCongruenceGroup(FilteredGroup):
    """
    Elements are stored as X with element = 1 + X.
    Coordinate j is the π-digit of one matrix entry; basis_matrices[j] is the
    matrix that coordinate multiplies.
    """

    def __init__(self, spec: MatrixGroupSpec):
        self.spec = spec
        ring = spec.ring
        self.n = spec.n
        self.c0 = smallest_nonresidue(ring.p) if spec.shape == "quaternion" else None
        self.positions, self.basis_matrices = self._lattice(spec)
        if spec.filtration == "weil":
            weights = [Fraction(0)] * len(self.positions)
        else:
            weights = [Fraction(d, ring.e) for _, _, d in self.positions]
        caps = [ring.digit_precision[d] for _, _, d in self.positions]
        super().__init__(ring, weights, caps, Fraction(spec.level, ring.e), spec.label())

    def _lattice(self, spec: MatrixGroupSpec):
        ring, n, e = spec.ring, spec.n, spec.ring.e
        if spec.shape == "quaternion":
            pi = [0, 1]
            c = self.c0
            mats = {
                "I": [[1, 0], [0, 1]],
                "U": [[0, c], [1, 0]],
                "P": [[pi, 0], [0, [0, -1]]],
                "UP": [[0, [0, -c]], [pi, 0]],
            }
            reading = {"I": (0, 0, 0), "U": (1, 0, 0), "P": (0, 0, 1), "UP": (1, 0, 1)}
            order = ("I", "U", "P", "UP")
            return [reading[k] for k in order], [PAdicMatrix.from_rows(ring, mats[k]) for k in order]
        if spec.shape == "full":
            entries = [(i, k) for i in range(n) for k in range(n)]
        elif spec.shape == "unipotent":
            entries = [(i, k) for i in range(n) for k in range(i + 1, n)]
        else:
            entries = [(i, i) for i in range(n)]
        positions, mats = [], []
        for d in range(e):
            for i, k in entries:
                digits = [0] * e
                digits[d] = 1
                rows = [[0] * n for _ in range(n)]
                rows[i][k] = digits
                positions.append((i, k, d))
                mats.append(PAdicMatrix.from_rows(ring, rows))
        return positions, mats

    # ---- FilteredGroup interface ----
    def coordinates(self, X: PAdicMatrix) -> tuple[int, ...]:
        return tuple(X.get(i, k)[d] for i, k, d in self.positions)

    def from_coordinates(self, a: Sequence[int]) -> PAdicMatrix:
        ring = self.ring
        entries = [ring.zero()] * (self.n * self.n)
        for aj, B in zip(a, self.basis_matrices):
            if aj:
                entries = [ring.add(x, ring.scale(b, aj)) if any(b) else x
                           for x, b in zip(entries, B.entries)]
        return PAdicMatrix(ring, self.n, self.n, tuple(entries))

    def identity(self) -> PAdicMatrix:
        return PAdicMatrix.zeros(self.ring, self.n)

    def multiply(self, X: PAdicMatrix, Y: PAdicMatrix) -> PAdicMatrix:
        return X + Y + X @ Y

    def invert(self, X: PAdicMatrix) -> PAdicMatrix:
        # (1+X)^-1 = 1 + Σ_{m>=1} (-X)^m
        total = self.identity()
        term = -X
        for _ in range(self.ring.N * self.ring.e + 1):
            if term.is_zero():
                return total
            total = total + term
            term = term @ (-X)
        raise ConstructionError(f"geometric series did not terminate for {self.describe(X)}")

    def is_member(self, X: PAdicMatrix) -> bool:
        if self.from_coordinates(self.coordinates(X)) != X:
            return False
        return self.omega(X) >= self.nu0

    # ---- matrices ----
    def matrix(self, X: PAdicMatrix) -> PAdicMatrix:
        return PAdicMatrix.identity(self.ring, self.n) + X

    def from_matrix(self, A: PAdicMatrix) -> PAdicMatrix:
        X = A - PAdicMatrix.identity(self.ring, self.n)
        if not self.is_member(X):
            raise ValueError(f"matrix {A} is not in {self.name}")
        return X

    def element(self, rows) -> PAdicMatrix:
        """Group element from the rows of the matrix 1 + X."""
        return self.from_matrix(PAdicMatrix.from_rows(self.ring, rows))

    def describe(self, X: PAdicMatrix) -> str:
        return f"{self.name}: 1+X with coords={list(self.key(X))}"

    # ---- batched arithmetic on coordinate arrays ----
    @cached_property
    def structure_tensor(self) -> np.ndarray:
        """T[j, l, m] = coordinate m of B_j·B_l, as a centered integer."""
        d = self.rank
        T = np.zeros((d, d, d), dtype=np.int64)
        for j, Bj in enumerate(self.basis_matrices):
            for l, Bl in enumerate(self.basis_matrices):
                for m, c in enumerate(self.coordinates(Bj @ Bl)):
                    mod = self.p ** self.caps[m]
                    T[j, l, m] = c - mod if c > mod // 2 else c
        return T

    def _ring_product(self, A: np.ndarray, B: np.ndarray, moduli: np.ndarray) -> np.ndarray:
        s, d = A.shape
        bound = int(moduli.max()) ** 2 * d * d * max(1, int(np.abs(self.structure_tensor).max()))
        if bound >= 2 ** 62:
            raise BudgetExceeded("int64 batch product bound", 2 ** 62, bound)
        outer = (A[:, :, None] * B[:, None, :]).reshape(s, d * d)
        return (outer @ self.structure_tensor.reshape(d * d, d)) % moduli

    def batch_multiply(self, A: np.ndarray, B: np.ndarray, moduli: np.ndarray) -> np.ndarray:
        return (A + B + self._ring_product(A, B, moduli)) % moduli

    def batch_invert(self, A: np.ndarray, moduli: np.ndarray) -> np.ndarray:
        total = np.zeros_like(A)
        term = A % moduli
        sign = -1
        for _ in range(int(math.log2(int(moduli.max()) + 1)) * self.e + 2):
            if not term.any():
                return total % moduli
            total = total + sign * term
            term = self._ring_product(term, A, moduli)
            sign = -sign
        raise ConstructionError("batched geometric series did not terminate")


def build_group(spec: MatrixGroupSpec) -> MatrixCongruenceGroup:
    """1 + π^level Λ with the requested shape; level must reach ρ unless the p=2 flag is on."""
    ring = spec.ring
    if ring.p == 2 and not config.allow_p2():
        raise ValueError("p=2 groups need LAZARDLAB_ALLOW_P2 (or --allow-p2)")
    if spec.level < ring.rho and not (ring.p == 2 and config.allow_p2()):
        raise ValueError(f"level {spec.level} < ρ={ring.rho}: ω would not exceed 1/(p-1)")
    G = MatrixCongruenceGroup(spec)
    log.info("[pgroups] built %s (rank %d, ω >= %s)", G.name, G.rank, G.nu0)
    return G


def build_fixture(name: str, precision: Optional[int] = None) -> MatrixCongruenceGroup:
    return build_group(MatrixGroupSpec.from_fixture(name, precision))


# --------------- finite quotients ---------------
class FiniteQuotient:
    """G / G_{m/e}: elements indexed by the mixed-radix digits of their truncated coordinates."""

    def __init__(self, G: FilteredGroup, m: int):
        self.G = G
        self.m = m
        self.nu = Fraction(m, G.e)
        if self.nu <= G.nu0:
            raise ValueError(f"quotient level {m} must exceed the group level {G.nu0 * G.e}")
        if self.nu > G.bottom:
            raise InsufficientPrecision(f"quotient level {m} needs precision beyond {G.bottom}", m + G.e)
        self.base = np.array(G.floor_exponents(), dtype=np.int64)
        self.top = np.array([G.lo(j, self.nu) for j in range(G.rank)], dtype=np.int64)
        self.moduli = np.array([G.p ** int(t) for t in self.top], dtype=np.int64)
        self.scale = np.array([G.p ** int(b) for b in self.base], dtype=np.int64)
        radix = [G.p ** int(t - b) for t, b in zip(self.top, self.base)]
        order = math.prod(radix)
        if order > config.QUOTIENT_CAP:
            raise BudgetExceeded(f"quotient {G.name} at level {m}", config.QUOTIENT_CAP, order)
        self.radix = np.array(radix, dtype=np.int64)
        self.strides = np.cumprod([1] + radix[:-1]).astype(np.int64)
        self.order = order
        self._table: Optional[np.ndarray] = None
        self._inverse: Optional[np.ndarray] = None
        log.info("[pgroups] quotient %s at level %d: order %d", G.name, m, order)

    @property
    def log_order(self) -> int:
        return int(round(math.log(self.order, self.G.p))) if self.order > 1 else 0

    # ---- indexing ----
    def decode(self, idx) -> np.ndarray:
        idx = np.asarray(idx, dtype=np.int64)
        u = (idx[..., None] // self.strides) % self.radix
        return u * self.scale

    def encode(self, coords: np.ndarray) -> np.ndarray:
        c = np.asarray(coords, dtype=np.int64) % self.moduli
        if (c % self.scale).any():
            raise ValueError("coordinates below the group level do not belong to G")
        return ((c // self.scale) * self.strides).sum(axis=-1)

    def element(self, i: int):
        return self.G.from_coordinates([int(a) for a in self.decode(i)])

    def index_of(self, x) -> int:
        c = np.array([[int(a) % int(m) for a, m in zip(self.G.coordinates(x), self.moduli)]], dtype=np.int64)
        return int(self.encode(c)[0])

    def all_indices(self) -> np.ndarray:
        return np.arange(self.order, dtype=np.int64)

    # ---- multiplication ----
    def _mul_coords(self, A: np.ndarray, B: np.ndarray) -> np.ndarray:
        G = self.G
        if hasattr(G, "batch_multiply"):
            return G.batch_multiply(A, B, self.moduli)
        out = np.zeros_like(A)
        for r in range(A.shape[0]):
            x = G.from_coordinates([int(a) for a in A[r]])
            y = G.from_coordinates([int(a) for a in B[r]])
            out[r] = [a % int(m) for a, m in zip(G.coordinates(G.multiply(x, y)), self.moduli)]
        return out

    @property
    def table(self) -> Optional[np.ndarray]:
        """Full multiplication table when order² fits TABLE_CAP, else None."""
        if self._table is None and self.order ** 2 <= config.TABLE_CAP:
            s = self.order
            table = np.empty((s, s), dtype=np.int64)
            allc = self.decode(self.all_indices())
            for i in range(s):
                row = np.broadcast_to(allc[i], allc.shape)
                table[i] = self.encode(self._mul_coords(np.ascontiguousarray(row), allc))
            self._table = table
        return self._table

    def mul(self, I, J) -> np.ndarray:
        I = np.asarray(I, dtype=np.int64)
        J = np.asarray(J, dtype=np.int64)
        I, J = np.broadcast_arrays(I, J)
        if self.table is not None:
            return self._table[I, J]
        flat_i, flat_j = I.ravel(), J.ravel()
        out = self.encode(self._mul_coords(self.decode(flat_i), self.decode(flat_j)))
        return out.reshape(I.shape)

    @property
    def inverse(self) -> np.ndarray:
        if self._inverse is None:
            allc = self.decode(self.all_indices())
            G = self.G
            if hasattr(G, "batch_invert"):
                self._inverse = self.encode(G.batch_invert(allc, self.moduli))
            else:
                self._inverse = np.array([self.index_of(G.invert(self.element(i))) for i in range(self.order)],
                                         dtype=np.int64)
        return self._inverse

    # ---- structure ----
    def projection_to(self, small: "FiniteQuotient") -> np.ndarray:
        """Index map of the natural surjection onto a quotient at a lower level."""
        if small.G is not self.G or small.m > self.m:
            raise ValueError("projection needs a quotient of the same group at a lower level")
        return small.encode(self.decode(self.all_indices()))

    def generator_indices(self) -> list[int]:
        """Images of the ordered basis when it exists, else every coordinate unit below the level."""
        G = self.G
        try:
            elements = list(find_ordered_basis(G).elements)
        except (ConstructionError, InsufficientPrecision):
            elements = []
            for j in range(G.rank):
                k = G.lo(j, G.nu0)
                if k < int(self.top[j]):
                    elements.append(G.unit_element(j, k))
        out = sorted({self.index_of(x) for x in elements} - {0})
        return out

    def element_orders(self) -> np.ndarray:
        s = self.order
        idx = self.all_indices()
        cur = idx.copy()
        orders = np.zeros(s, dtype=np.int64)
        orders[0] = 1
        t = 1
        while (orders == 0).any():
            t += 1
            cur = self.mul(cur, idx)
            orders[(cur == 0) & (orders == 0)] = t
            if t > s:
                raise ConstructionError("element order exceeds the group order")
        return orders

    def exponent(self) -> int:
        return int(self.element_orders().max())

    def is_homomorphism_to(self, small: "FiniteQuotient", pairs: int = 200, seed: int = 0) -> bool:
        proj = self.projection_to(small)
        rng = np.random.default_rng(seed)
        I = rng.integers(0, self.order, size=pairs)
        J = rng.integers(0, self.order, size=pairs)
        return bool((proj[self.mul(I, J)] == small.mul(proj[I], proj[J])).all())


def finite_quotient(G: FilteredGroup, m: int) -> FiniteQuotient:
    return FiniteQuotient(G, m)


# --------------- sifting below a cutoff ---------------
class SiftTable:
    """
    Echelon data for a subgroup containing G_cut: one slot per (degree, coordinate)
    holding an element whose gr-class has leading digit 1 there.
    """

    def __init__(self, G: FilteredGroup, cut: Fraction):
        self.G = G
        self.cut = Fraction(cut)
        self.slots: dict[tuple[Fraction, int], object] = {}

    def __len__(self) -> int:
        return len(self.slots)

    def elements(self) -> list:
        return [self.slots[k] for k in sorted(self.slots)]

    def _reduce(self, x, insert: bool):
        G, p = self.G, self.G.p
        while True:
            nu = G.omega(x)
            if nu >= self.cut or nu >= G.bottom:
                return None
            positions = G.gr_positions(nu)
            vec = G.gr_vector(x, nu)
            lead = next(i for i, c in enumerate(vec) if c)
            key = (nu, positions[lead])
            c = vec[lead]
            if key in self.slots:
                x = G.multiply(x, G.power(self.slots[key], -c))
                continue
            if not insert:
                return x
            y = G.power(x, pow(c, -1, p)) if c != 1 else x
            self.slots[key] = y
            return y

    def sift(self, x):
        """Remainder of x after elimination; None when x lies in the subgroup."""
        return self._reduce(x, insert=False)

    def contains(self, x) -> bool:
        return self.sift(x) is None

    def add(self, x):
        return self._reduce(x, insert=True)

    def degree_counts(self) -> dict[Fraction, int]:
        out: dict[Fraction, int] = {}
        for nu, _ in self.slots:
            out[nu] = out.get(nu, 0) + 1
        return out

    def filtration_level(self) -> Optional[Fraction]:
        """ν when the subgroup equals G_ν modulo G_cut, else None."""
        G = self.G
        counts = self.degree_counts()
        if not counts:
            return self.cut
        low = min(counts)
        for nu in G.values_between(low, self.cut):
            if counts.get(nu, 0) != len(G.gr_positions(nu)):
                return None
        return low


def full_table(G: FilteredGroup, cut: Fraction) -> SiftTable:
    T = SiftTable(G, cut)
    for nu in G.values_between(G.nu0, cut):
        for j in G.gr_positions(nu):
            T.slots[(nu, j)] = G.unit_element(j, int(nu - G.weights[j]))
    return T


def closure(G: FilteredGroup, seeds: Sequence, cut: Fraction, normalizers: Sequence = ()) -> SiftTable:
    """Smallest subgroup (mod G_cut) containing seeds and normalized by `normalizers`."""
    T = SiftTable(G, cut)
    queue = list(seeds)
    while queue:
        y = T.add(queue.pop())
        if y is None:
            continue
        queue.append(G.power(y, G.p))
        for t in list(T.slots.values()):
            queue.append(G.commutator(y, t))
        for g in normalizers:
            queue.append(G.commutator(y, g))
    return T


@dataclass
class LowerPSeries:
    group: str
    cut: Fraction
    levels: list[SiftTable]
    indices: list[int]  # [G_i : G_{i+1}]

    @property
    def constant(self) -> bool:
        return len(set(self.indices)) <= 1

    def filtration_levels(self) -> list[Optional[Fraction]]:
        return [t.filtration_level() for t in self.levels]

    def to_dict(self) -> dict:
        return {
            "group": self.group,
            "cut": str(self.cut),
            "indices": self.indices,
            "filtration_levels": [None if v is None else str(v) for v in self.filtration_levels()],
        }


def _series_cut(G: FilteredGroup, depth: int) -> Fraction:
    cut = G.nu0 + depth + 2
    if cut > G.bottom:
        raise InsufficientPrecision(f"lower p-series to depth {depth} needs ω decided up to {cut}",
                                    math.ceil(cut * G.e))
    return cut


def lower_p_series(G: FilteredGroup, depth: int) -> LowerPSeries:
    """G_1 = G, G_{i+1} = G_i^p [G_i, G], computed modulo G_cut with the margin asserted."""
    cut = _series_cut(G, depth)
    first = full_table(G, cut)
    gens = first.elements()
    levels = [first]
    for _ in range(depth):
        prev = levels[-1].elements()
        seeds = [G.power(x, G.p) for x in prev] + [G.commutator(x, g) for x in prev for g in gens]
        levels.append(closure(G, seeds, cut, gens))
    last = levels[-1]
    counts = last.degree_counts()
    for nu in G.values_between(cut - 1, cut):
        if counts.get(nu, 0) != len(G.gr_positions(nu)):
            raise InsufficientPrecision(
                f"G_{depth + 1} of {G.name} does not contain G_{cut - 1}; raise precision", math.ceil((cut + 2) * G.e))
    indices = [G.p ** (len(a) - len(b)) for a, b in zip(levels, levels[1:])]
    log.info("[pgroups] lower p-series of %s: indices %s", G.name, indices)
    return LowerPSeries(G.name, cut, levels, indices)


@dataclass
class UniformityVerdict:
    group: str
    generators: int
    finitely_generated: bool
    powerful: bool
    indices: list[int]
    constant_indices: bool
    witness: Optional[str] = None
    filtration_levels: list = field(default_factory=list)

    @property
    def uniform(self) -> bool:
        return self.finitely_generated and self.powerful and self.constant_indices

    def to_dict(self) -> dict:
        return {
            "group": self.group,
            "generators": self.generators,
            "finitely_generated": self.finitely_generated,
            "powerful": self.powerful,
            "indices": self.indices,
            "constant_indices": self.constant_indices,
            "uniform": self.uniform,
            "witness": self.witness,
            "filtration_levels": [None if v is None else str(v) for v in self.filtration_levels],
        }


def check_uniform(G: FilteredGroup, depth: int = 4) -> UniformityVerdict:
    series = lower_p_series(G, depth)
    first = series.levels[0]
    gens = first.elements()
    d = round(math.log(series.indices[0], G.p)) if series.indices else 0
    q = 4 if G.p == 2 else G.p
    powers = closure(G, [G.power(x, q) for x in gens], series.cut, gens)
    witness = None
    for i, x in enumerate(gens):
        for y in gens[i + 1:]:
            if not powers.contains(G.commutator(x, y)):
                witness = f"[{G.describe(x)}, {G.describe(y)}] not in G^{q}"
                break
        if witness:
            break
    verdict = UniformityVerdict(G.name, d, d > 0, witness is None, series.indices, series.constant,
                                witness, series.filtration_levels())
    log.info("[pgroups] %s uniform=%s", G.name, verdict.uniform)
    return verdict


def renormalize_valuation(G: FilteredGroup, t: Optional[Fraction] = None) -> ScaledFiltration:
    """ω' = ω + 1 - t, so the common basis valuation becomes 1."""
    if G.p == 2:
        raise ValueError("renormalization ω + 1 - t is only defined for odd p")
    basis = find_ordered_basis(G)
    if not basis.equi_p_valued:
        raise ValueError(f"{G.name} is not equi-p-valued: basis valuations {[str(v) for v in basis.valuations]}")
    t = basis.t if t is None else Fraction(t)
    if t != basis.t:
        raise ValueError(f"t={t} is not the common basis valuation {basis.t}")
    if t == 1:
        return ScaledFiltration(G, 1, Fraction(0), name=G.name)
    return ScaledFiltration(G, 1, 1 - t, name=f"{G.name} renormalized (t={t})")


# --------------- group spec text format ---------------
_SPEC_KEYS = ("p", "e", "eisenstein_poly", "n", "level", "shape", "fixture_tag", "precision_N", "filtration")


def parse_group_spec_text(text: str) -> MatrixGroupSpec:
    fields: dict[str, str] = {}
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"group spec line '{line}' is not 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in _SPEC_KEYS:
            raise ValueError(f"unknown group spec key '{key}'; known: " + ", ".join(_SPEC_KEYS))
        fields[key] = value
    if "p" not in fields:
        raise ValueError("group spec needs at least 'p'")
    mapping = {
        "p": int(fields["p"]),
        "e": int(fields.get("e", 1)),
        "eisenstein_poly": [int(t) for t in fields.get("eisenstein_poly", "").split()],
        "n": int(fields.get("n", 1)),
        "level": int(fields.get("level", 1)),
        "shape": fields.get("shape", "full"),
        "filtration": fields.get("filtration", "standard"),
        "fixture_tag": fields.get("fixture_tag", ""),
    }
    precision = int(fields["precision_N"]) if "precision_N" in fields else None
    return MatrixGroupSpec.from_mapping(mapping, precision)


def format_group_spec_text(spec: MatrixGroupSpec) -> str:
    ring = spec.ring
    lines = [
        f"p = {ring.p}",
        f"e = {ring.e}",
        "eisenstein_poly = " + " ".join(str(c) for c in ring.eisenstein_poly),
        f"n = {spec.n}",
        f"level = {spec.level}",
        f"shape = {spec.shape}",
        f"filtration = {spec.filtration}",
        f"precision_N = {ring.N}",
    ]
    if spec.fixture_tag:
        lines.append(f"fixture_tag = {spec.fixture_tag}")
    return "\n".join(lines) + "\n"


def load_group_spec(source: str, precision: Optional[int] = None) -> MatrixGroupSpec:
    """A fixture name or a path to a group spec file."""
    path = Path(source)
    if path.is_file():
        spec = parse_group_spec_text(path.read_text(encoding="utf-8"))
        return spec.with_precision(precision) if precision else spec
    return MatrixGroupSpec.from_fixture(source, precision)
