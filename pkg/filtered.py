# filtered.py
# ------------------------------------------------------------
# Filtered groups and the checks built on them.
# • FilteredGroup: a group whose elements carry Z_p-coordinates a_j with
#   weights w_j, so that ω(x) = min_j v(a_j) + w_j. Matrix congruence groups
#   (pgroups) and standard groups of formal group laws (formal_groups) both
#   live here; ω is only decided below the precision floor `bottom`.
# • check_filtration: sampled + exhaustive verification of the filtration
#   axioms, with per-axiom undecided counts instead of silent passes.
# • graded_pieces / find_ordered_basis: gr(G) and its F_p[ε]-basis.
# • FilteredFreeModule / saturate_filtered_free / groupring_valuation:
#   valuation bookkeeping for modules and group-ring monomials.
# ------------------------------------------------------------
from __future__ import annotations

import logging
import math
import random
from abc import ABC, abstractmethod
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Any, Callable, Optional, Sequence

import config
from errors import BudgetExceeded, ConstructionError, InsufficientPrecision
from padic_core import RingSpec, vp
from snf_engine import rank_mod_p

log = logging.getLogger("lazardlab.filtered")

AXIOM_IDS = ("1", "2", "p", "3", "4", "5", "6", "7")
AXIOM_TEXT = {
    "1": "ω(xy⁻¹) >= min(ω(x), ω(y))",
    "2": "ω([x,y]) >= ω(x) + ω(y)",
    "p": "ω(x^p) >= min(p·ω(x), ω(x) + 1)",
    "3": "ω(x) < ∞ for x != 1",
    "4": "ω(x) > 1/(p-1)",
    "5": "ω(x^p) = ω(x) + 1",
    "6": "ω(x) > p/(p-1) implies x = y^p with y in G",
    "7": "G complete for ω",
}


# --------------- the group interface ---------------
class FilteredGroup(ABC):
    """
    A group with a filtration read from Z_p-coordinates.
    Subclasses provide coordinates/from_coordinates and the group law; the
    coordinate j is known modulo p^caps[j] and contributes v(a_j) + weights[j].
    """

    def __init__(self, ring: RingSpec, weights: Sequence[Fraction], caps: Sequence[int],
                 nu0: Fraction, name: str, complete: bool = True):
        self.ring = ring
        self.p = ring.p
        self.e = ring.e
        self.weights = tuple(Fraction(w) for w in weights)
        self.caps = tuple(int(k) for k in caps)
        self.nu0 = Fraction(nu0)
        self.name = name
        self.complete = complete
        if len(self.weights) != len(self.caps):
            raise ValueError("weights and caps must have the same length")

    # ---- to implement ----
    @abstractmethod
    def coordinates(self, x) -> tuple[int, ...]: ...

    @abstractmethod
    def from_coordinates(self, a: Sequence[int]): ...

    @abstractmethod
    def identity(self): ...

    @abstractmethod
    def multiply(self, x, y): ...

    @abstractmethod
    def invert(self, x): ...

    # ---- filtration ----
    @property
    def rank(self) -> int:
        return len(self.weights)

    @property
    def bottom(self) -> Fraction:
        """Values at or above this are undecided at the working precision."""
        return min(Fraction(k) + w for k, w in zip(self.caps, self.weights))

    def omega(self, x) -> Fraction:
        best = None
        p = self.p
        for a, w, k in zip(self.coordinates(x), self.weights, self.caps):
            if a % p ** k:
                val = vp(a, p) + w
                if best is None or val < best:
                    best = val
        bottom = self.bottom
        return bottom if best is None or best >= bottom else best

    def is_trivial(self, x) -> bool:
        return self.omega(x) >= self.bottom

    def lo(self, j: int, nu: Fraction) -> int:
        """Least p-exponent of coordinate j on elements with ω >= nu."""
        return max(0, math.ceil(nu - self.weights[j]))

    def floor_exponents(self) -> tuple[int, ...]:
        return tuple(self.lo(j, self.nu0) for j in range(self.rank))

    def is_member(self, x) -> bool:
        return self.omega(x) >= self.nu0

    def same(self, x, y) -> bool:
        return self.key(x) == self.key(y)

    def key(self, x) -> tuple[int, ...]:
        return tuple(a % self.p ** k for a, k in zip(self.coordinates(x), self.caps))

    def describe(self, x) -> str:
        return f"{self.name}:coords={list(self.key(x))}"

    # ---- group helpers ----
    def power(self, x, n: int):
        if n < 0:
            return self.power(self.invert(x), -n)
        out = self.identity()
        base = x
        while n:
            if n & 1:
                out = self.multiply(out, base)
            n >>= 1
            if n:
                base = self.multiply(base, base)
        return out

    def commutator(self, x, y):
        return self.multiply(self.multiply(x, y), self.multiply(self.invert(x), self.invert(y)))

    def unit_element(self, j: int, exponent: int):
        a = [0] * self.rank
        a[j] = self.p ** exponent
        return self.from_coordinates(a)

    def random_element(self, rng: random.Random, min_value: Optional[Fraction] = None):
        nu = self.nu0 if min_value is None else max(self.nu0, Fraction(min_value))
        a = []
        for j in range(self.rank):
            lo, cap = self.lo(j, nu), self.caps[j]
            a.append(self.p ** lo * rng.randrange(self.p ** (cap - lo)) if lo < cap else 0)
        return self.from_coordinates(a)

    def values_between(self, lo: Fraction, hi: Fraction) -> list[Fraction]:
        """The grid (1/e)Z ∩ [lo, hi)."""
        start = math.ceil(lo * self.e)
        out = []
        k = start
        while Fraction(k, self.e) < hi:
            out.append(Fraction(k, self.e))
            k += 1
        return out

    # ---- graded pieces ----
    def gr_positions(self, nu: Fraction) -> list[int]:
        out = []
        for j, (w, cap) in enumerate(zip(self.weights, self.caps)):
            k = nu - w
            if k.denominator == 1 and self.lo(j, self.nu0) <= k < cap:
                out.append(j)
        return out

    def gr_vector(self, x, nu: Fraction) -> tuple[int, ...]:
        """Class of x (ω(x) >= nu) in G_nu / G_nu+, in the digit basis of gr_positions(nu)."""
        a = self.coordinates(x)
        p = self.p
        out = []
        for j in self.gr_positions(nu):
            k = int(nu - self.weights[j])
            out.append((a[j] // p ** k) % p)
        return tuple(out)

    # ---- p-th roots ----
    def p_root(self, x, max_steps: Optional[int] = None):
        """
        y in G with y^p = x at precision, or None.
        Newton step y <- y·z with z read from (y^p)⁻¹x by halving p out of its coordinates.
        """
        p = self.p
        if self.is_trivial(x):
            return self.identity()
        steps = max_steps or 4 * self.ring.N * self.e + 8
        y = self.identity()
        for _ in range(steps):
            r = self.multiply(self.invert(self.power(y, p)), x)
            if self.is_trivial(r):
                break
            c = self.coordinates(r)
            if any(a % p for a in c):
                return None
            y = self.multiply(y, self.from_coordinates([a // p for a in c]))
        else:
            return None
        if not self.is_trivial(self.multiply(self.invert(self.power(y, p)), x)):
            return None
        return y if self.is_member(y) else None


class ScaledFiltration(FilteredGroup):
    """The same group with ω replaced by scale·ω + shift."""

    def __init__(self, base: FilteredGroup, scale: int = 1, shift: Fraction = Fraction(0), name: str = ""):
        self.base = base
        self.scale = int(scale)
        self.shift = Fraction(shift)
        if self.scale < 1:
            raise ValueError("scale must be a positive integer")
        weights = [w + self.shift for w in base.weights] if self.scale == 1 else base.weights
        sign = "+" if self.shift >= 0 else ""
        super().__init__(base.ring, weights, base.caps, self.scale * base.nu0 + self.shift,
                         name or f"{base.name}[{self.scale}ω{sign}{self.shift}]", base.complete)

    def coordinates(self, x):
        return self.base.coordinates(x)

    def from_coordinates(self, a):
        return self.base.from_coordinates(a)

    def identity(self):
        return self.base.identity()

    def multiply(self, x, y):
        return self.base.multiply(x, y)

    def invert(self, x):
        return self.base.invert(x)

    def is_member(self, x) -> bool:
        return self.base.is_member(x)

    @property
    def bottom(self) -> Fraction:
        return self.scale * self.base.bottom + self.shift

    def omega(self, x) -> Fraction:
        return self.scale * self.base.omega(x) + self.shift

    def random_element(self, rng, min_value=None):
        base_min = None if min_value is None else (Fraction(min_value) - self.shift) / self.scale
        return self.base.random_element(rng, base_min)

    def gr_positions(self, nu):
        if self.scale != 1:
            raise NotImplementedError("graded pieces need an unscaled filtration")
        return super().gr_positions(nu)


# --------------- reports ---------------
@dataclass
class AxiomResult:
    status: str  # holds | fails | not-applicable | insufficient-precision
    checked: int = 0
    undecided: int = 0
    witness: Optional[str] = None
    note: str = ""

    def to_dict(self) -> dict:
        out = {"status": self.status, "checked": self.checked, "undecided": self.undecided}
        if self.witness:
            out["witness"] = self.witness
        if self.note:
            out["note"] = self.note
        return out


@dataclass
class FiltrationReport:
    group: str
    axioms: dict[str, AxiomResult]
    sample_size: int
    seed: int
    value_set: list[Fraction] = field(default_factory=list)

    def holds(self, axiom: str) -> bool:
        return self.axioms[axiom].status == "holds"

    @property
    def p_valued(self) -> bool:
        return all(self.holds(a) for a in ("1", "2", "p", "3", "4", "5", "7"))

    @property
    def saturated(self) -> bool:
        return self.p_valued and self.holds("6")

    def failures(self) -> list[str]:
        return [a for a in AXIOM_IDS if self.axioms[a].status == "fails"]

    def to_dict(self) -> dict:
        return {
            "group": self.group,
            "sample_size": self.sample_size,
            "seed": self.seed,
            "axioms": {a: self.axioms[a].to_dict() for a in AXIOM_IDS},
            "value_set": [str(v) for v in self.value_set],
            "p_valued": self.p_valued,
            "saturated": self.saturated,
        }


class _Tally:
    def __init__(self):
        self.checked = 0
        self.undecided = 0
        self.witness = None

    def record(self, verdict: Optional[bool], witness: Callable[[], str]) -> None:
        if verdict is None:
            self.undecided += 1
        elif verdict:
            self.checked += 1
        else:
            self.checked += 1
            if self.witness is None:
                self.witness = witness()

    def result(self, note: str = "") -> AxiomResult:
        if self.witness is not None:
            return AxiomResult("fails", self.checked, self.undecided, self.witness, note)
        if self.checked == 0:
            return AxiomResult("insufficient-precision", 0, self.undecided, None, note)
        return AxiomResult("holds", self.checked, self.undecided, None, note)


def _ge(lhs: Fraction, rhs: Fraction, bottom: Fraction) -> Optional[bool]:
    """lhs >= rhs where lhs == bottom means 'at least bottom'."""
    if lhs < bottom:
        return lhs >= rhs
    return True if rhs <= bottom else None


# --------------- axiom checks ---------------
def _nontrivial_sample(G: FilteredGroup, rng: random.Random, min_value=None):
    for _ in range(32):
        x = G.random_element(rng, min_value)
        if not G.is_trivial(x):
            return x
    return None


def _axiom_1(G, rng, samples, seen):
    t = _Tally()
    for _ in range(samples):
        x, y = G.random_element(rng), G.random_element(rng)
        wx, wy = G.omega(x), G.omega(y)
        seen.update((wx, wy))
        rhs = min(wx, wy)
        if rhs >= G.bottom:
            t.record(None, str)
            continue
        t.record(_ge(G.omega(G.multiply(x, G.invert(y))), rhs, G.bottom),
                 lambda: f"x={G.describe(x)}, y={G.describe(y)}")
    return t.result()


def _axiom_2(G, rng, samples, seen):
    t = _Tally()
    for _ in range(samples):
        x, y = _nontrivial_sample(G, rng), _nontrivial_sample(G, rng)
        if x is None or y is None:
            t.record(None, str)
            continue
        rhs = G.omega(x) + G.omega(y)
        t.record(_ge(G.omega(G.commutator(x, y)), rhs, G.bottom),
                 lambda: f"x={G.describe(x)}, y={G.describe(y)}")
    return t.result()


def _axiom_p(G, rng, samples, seen):
    t = _Tally()
    for _ in range(samples):
        x = _nontrivial_sample(G, rng)
        if x is None:
            t.record(None, str)
            continue
        w = G.omega(x)
        t.record(_ge(G.omega(G.power(x, G.p)), min(G.p * w, w + 1), G.bottom),
                 lambda: f"x={G.describe(x)}")
    return t.result()


def _axiom_3(G, rng, samples, seen):
    t = _Tally()
    for _ in range(samples):
        x = _nontrivial_sample(G, rng)
        if x is None:
            t.record(None, str)
            continue
        seen.add(G.omega(x))
        t.record(G.omega(x) < G.bottom, lambda: f"x={G.describe(x)}")
    return t.result("finite on every sampled non-identity element")


def _lowest_element(G: FilteredGroup):
    best = None
    for j in range(G.rank):
        k = G.lo(j, G.nu0)
        if k < G.caps[j]:
            val = k + G.weights[j]
            if best is None or val < best[0]:
                best = (val, j, k)
    return None if best is None else G.unit_element(best[1], best[2])


def _axiom_4(G, rng, samples, seen):
    t = _Tally()
    threshold = Fraction(1, G.p - 1)
    low = _lowest_element(G)
    if low is not None:
        t.record(G.omega(low) > threshold, lambda: f"x={G.describe(low)}")
    for _ in range(samples):
        x = _nontrivial_sample(G, rng)
        if x is None:
            continue
        t.record(G.omega(x) > threshold, lambda: f"x={G.describe(x)}")
    return t.result()


def _check_power_rule(G, x, t: _Tally) -> None:
    w = G.omega(x)
    if w >= G.bottom or w + 1 >= G.bottom:
        t.record(None, str)
        return
    t.record(G.omega(G.power(x, G.p)) == w + 1, lambda: f"x={G.describe(x)}")


def _axiom_5(G, rng, samples, seen, extra=()):
    t = _Tally()
    for _ in range(samples):
        x = _nontrivial_sample(G, rng)
        if x is not None:
            _check_power_rule(G, x, t)
    for x in extra:
        _check_power_rule(G, x, t)
    return t.result("sampled" + (" + ordered basis and pairwise products" if extra else ""))


def _root_threshold(G) -> Fraction:
    tau = Fraction(G.p, G.p - 1)
    return max(G.nu0, Fraction(math.floor(tau * G.e) + 1, G.e))


def _axiom_6(G, rng, samples, seen, extra=()):
    t = _Tally()
    tau = Fraction(G.p, G.p - 1)
    mu = _root_threshold(G)
    if mu >= G.bottom:
        return AxiomResult("insufficient-precision", 0, samples, None, "no decidable elements above p/(p-1)")

    def check(x):
        if G.is_trivial(x):
            t.record(None, str)
            return
        t.record(G.p_root(x) is not None, lambda: f"x={G.describe(x)} has no p-th root in G")

    for x in extra:
        if tau < G.omega(x) < G.bottom:
            check(x)
    for _ in range(samples):
        check(G.random_element(rng, mu))
    return t.result()


def _axiom_7(G, rng, samples, seen):
    if G.complete:
        return AxiomResult("holds", 0, 0, None, "declared from the construction (not sampled)")
    return AxiomResult("not-applicable", 0, 0, None, "construction does not declare completeness")


def _exhaustive_elements(G: FilteredGroup, basis: Optional["OrderedBasis"]) -> list:
    if basis is None:
        return []
    xs = list(basis.elements)
    out = list(xs)
    for i, x in enumerate(xs):
        for y in xs[i:]:
            out.append(G.multiply(x, y))
    return out


def check_filtration(G: FilteredGroup, samples: Optional[int] = None, seed: Optional[int] = None,
                     workers: int = 1, exhaustive: bool = True) -> FiltrationReport:
    """Evaluate every filtration axiom on `samples` pseudo-random elements (fixed seed)."""
    samples = config.FILTRATION_SAMPLES if samples is None else samples
    seed = config.DEFAULT_SEED if seed is None else seed
    basis = None
    if exhaustive:
        try:
            basis = find_ordered_basis(G)
        except (ConstructionError, InsufficientPrecision, NotImplementedError) as e:
            log.info("[filtered] no ordered basis for exhaustive checks on %s: %s", G.name, e)
    extra = _exhaustive_elements(G, basis)
    checks = {
        "1": lambda rng, seen: _axiom_1(G, rng, samples, seen),
        "2": lambda rng, seen: _axiom_2(G, rng, samples, seen),
        "p": lambda rng, seen: _axiom_p(G, rng, samples, seen),
        "3": lambda rng, seen: _axiom_3(G, rng, samples, seen),
        "4": lambda rng, seen: _axiom_4(G, rng, samples, seen),
        "5": lambda rng, seen: _axiom_5(G, rng, samples, seen, extra),
        "6": lambda rng, seen: _axiom_6(G, rng, samples, seen, extra),
        "7": lambda rng, seen: _axiom_7(G, rng, samples, seen),
    }

    def run(idx_axiom):
        idx, axiom = idx_axiom
        rng = random.Random(seed * 1009 + idx)
        seen: set = set()
        return axiom, checks[axiom](rng, seen), seen

    jobs = list(enumerate(AXIOM_IDS))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(run, jobs))
    else:
        outcomes = [run(j) for j in jobs]
    axioms, values = {}, set()
    for axiom, result, seen in outcomes:
        axioms[axiom] = result
        values |= seen
    report = FiltrationReport(G.name, axioms, samples, seed,
                              sorted(v for v in values if v < G.bottom))
    log.info("[filtered] %s: p-valued=%s saturated=%s", G.name, report.p_valued, report.saturated)
    return report


# --------------- graded pieces and ordered bases ---------------
@dataclass(frozen=True)
class GradedPiece:
    nu: Fraction
    dim: int
    epsilon: Optional[tuple[tuple[int, ...], ...]]  # rows: gr_{nu+1} digits, columns: gr_nu basis


def graded_pieces(G: FilteredGroup, up_to: Fraction) -> list[GradedPiece]:
    """dim_F_p G_nu/G_nu+ for nu in [nu0, up_to], with the matrix of x -> x^p into degree nu+1."""
    up_to = Fraction(up_to)
    if up_to > G.bottom:
        raise InsufficientPrecision(f"graded pieces up to {up_to} exceed precision floor {G.bottom}",
                                    math.ceil(up_to * G.e))
    pieces = []
    for nu in G.values_between(G.nu0, up_to + Fraction(1, 10 * G.e)):
        if nu >= G.bottom:
            break
        positions = G.gr_positions(nu)
        if not positions:
            continue
        count = G.p ** len(positions)
        if count > config.GR_ENUM_CAP:
            raise BudgetExceeded(f"gr enumeration at ν={nu}", config.GR_ENUM_CAP, count)
        classes = set()
        for digits in product(range(G.p), repeat=len(positions)):
            a = [0] * G.rank
            for j, c in zip(positions, digits):
                a[j] = c * G.p ** int(nu - G.weights[j])
            x = G.from_coordinates(a)
            if any(digits) and G.omega(x) != nu:
                raise ConstructionError(f"coset representative {G.describe(x)} is not of exact degree {nu}")
            classes.add(G.gr_vector(x, nu))
        dim = round(math.log(len(classes), G.p))
        epsilon = None
        if nu + 1 < G.bottom:
            cols = []
            for j in positions:
                y = G.power(G.unit_element(j, int(nu - G.weights[j])), G.p)
                if G.omega(y) < nu + 1:
                    raise ConstructionError(f"x^p drops below degree {nu + 1} at {G.describe(y)}")
                cols.append(G.gr_vector(y, nu + 1))
            epsilon = tuple(tuple(col[i] for col in cols) for i in range(len(G.gr_positions(nu + 1))))
        pieces.append(GradedPiece(nu, dim, epsilon))
    return pieces


def epsilon_is_injective(piece: GradedPiece, p: int) -> Optional[bool]:
    if piece.epsilon is None:
        return None
    if not piece.epsilon:
        return piece.dim == 0
    return rank_mod_p([list(r) for r in piece.epsilon], p) == piece.dim


@dataclass(frozen=True)
class OrderedBasis:
    elements: tuple
    valuations: tuple[Fraction, ...]
    group: str = ""

    @property
    def rank(self) -> int:
        return len(self.elements)

    @property
    def equi_p_valued(self) -> bool:
        return len(set(self.valuations)) <= 1

    @property
    def t(self) -> Optional[Fraction]:
        return self.valuations[0] if self.valuations and self.equi_p_valued else None

    def to_dict(self, G: Optional[FilteredGroup] = None) -> dict:
        out = {"valuations": [str(v) for v in self.valuations], "equi_p_valued": self.equi_p_valued}
        if G is not None:
            out["elements"] = [G.describe(x) for x in self.elements]
        return out


def find_ordered_basis(G: FilteredGroup) -> OrderedBasis:
    """Elements whose gr-classes freely generate gr(G) over F_p[ε], in non-decreasing ω."""
    chosen: list[tuple[Any, Fraction]] = []
    nu = G.nu0
    step = Fraction(1, G.e)
    while len(chosen) < G.rank:
        if nu >= G.bottom:
            raise InsufficientPrecision(f"ordered basis of {G.name} incomplete below {G.bottom}",
                                        math.ceil((nu + 1) * G.e))
        positions = G.gr_positions(nu)
        if positions:
            vectors = []
            for x, mu in chosen:
                n = nu - mu
                if n.denominator != 1:
                    continue
                y = G.power(x, G.p ** int(n))
                if G.omega(y) != nu:
                    raise ConstructionError(
                        f"gr({G.name}) not free: ε^{n} of {G.describe(x)} has ω={G.omega(y)}, expected {nu}")
                vectors.append(list(G.gr_vector(y, nu)))
            r = rank_mod_p(vectors, G.p) if vectors else 0
            if r < len(vectors):
                raise ConstructionError(f"gr({G.name}) not free over F_p[ε] in degree {nu}")
            for idx, j in enumerate(positions):
                if r == len(positions):
                    break
                unit = [1 if i == idx else 0 for i in range(len(positions))]
                if rank_mod_p(vectors + [unit], G.p) > r:
                    vectors.append(unit)
                    r += 1
                    chosen.append((G.unit_element(j, int(nu - G.weights[j])), nu))
        nu += step
    basis = OrderedBasis(tuple(x for x, _ in chosen), tuple(mu for _, mu in chosen), G.name)
    log.info("[filtered] ordered basis of %s: valuations %s", G.name, [str(v) for v in basis.valuations])
    return basis


# --------------- filtered-free modules ---------------
@dataclass(frozen=True)
class FilteredFreeModule:
    """
    Free module on generators e_i of valuation w(e_i). `step` is the degree of the
    uniformizer that saturation may divide by: 1/e over O_K (ε_K), 1 over Z_p (ε).
    """
    rank: int
    generator_valuations: tuple[Fraction, ...]
    e: int = 1
    base: str = "A"  # A: group side, B: Lie side
    rescaling: tuple[int, ...] = ()
    step: Optional[Fraction] = None

    def __post_init__(self):
        vals = tuple(Fraction(v) for v in self.generator_valuations)
        if len(vals) != self.rank:
            raise ValueError("need one valuation per generator")
        if any(v < 0 or (v * self.e).denominator != 1 for v in vals):
            raise ValueError("generator valuations must lie in (1/e)·Z_{>=0}")
        step = Fraction(1, self.e) if self.step is None else Fraction(self.step)
        if step <= 0 or (step * self.e).denominator != 1:
            raise ValueError(f"uniformizer degree {step} is not a positive multiple of 1/{self.e}")
        object.__setattr__(self, "generator_valuations", vals)
        object.__setattr__(self, "step", step)
        if not self.rescaling:
            object.__setattr__(self, "rescaling", (0,) * self.rank)

    def valuation(self, coefficient_valuations: Sequence[Fraction]) -> Fraction:
        """w(Σ λ_i e_i) = min_i v(λ_i) + w(e_i)."""
        return min(Fraction(v) + w for v, w in zip(coefficient_valuations, self.generator_valuations))

    def _degrees(self, up_to: Fraction):
        k = 0
        while Fraction(k, self.e) <= up_to:
            yield Fraction(k, self.e)
            k += 1

    def _on_orbit(self, nu: Fraction, w: Fraction) -> bool:
        return ((nu - w) / self.step).denominator == 1

    def graded_dimensions(self, up_to: Fraction) -> dict[Fraction, int]:
        """dim gr_ν M: generators with w ≤ ν in the same step-class as ν."""
        return {nu: sum(1 for w in self.generator_valuations if w <= nu and self._on_orbit(nu, w))
                for nu in self._degrees(up_to)}

    def laurent_dimensions(self, up_to: Fraction) -> dict[Fraction, int]:
        """Graded dims of (gr M ⊗ F_p[u^{±1}]) in degrees 0..up_to, u the uniformizer class."""
        return {nu: sum(1 for w in self.generator_valuations if self._on_orbit(nu, w))
                for nu in self._degrees(up_to)}


def saturate_filtered_free(M: FilteredFreeModule) -> FilteredFreeModule:
    """Divide e_i by the largest uniformizer power keeping w(e_i) ≥ 0: w becomes w mod step."""
    exponents = tuple(int(w // M.step) for w in M.generator_valuations)
    vals = tuple(w - a * M.step for w, a in zip(M.generator_valuations, exponents))
    return FilteredFreeModule(M.rank, vals, M.e, M.base,
                              tuple(a + b for a, b in zip(exponents, M.rescaling)), M.step)


def rescale(M: FilteredFreeModule, exponents: Sequence[int]) -> FilteredFreeModule:
    """Inverse of saturation: multiply generator i by the uniformizer to the exponents[i]."""
    vals = tuple(w + a * M.step for w, a in zip(M.generator_valuations, exponents))
    return FilteredFreeModule(M.rank, vals, M.e, M.base, step=M.step)


def sat_matches_laurent(M: FilteredFreeModule, up_to: Fraction) -> bool:
    """gr(Sat M) = (gr M ⊗ F_p[u^{±1}])_{degree ≥ 0}, compared degree by degree."""
    return saturate_filtered_free(M).graded_dimensions(up_to) == M.laurent_dimensions(up_to)


def groupring_valuation(alpha: Sequence[int], basis) -> Fraction:
    """w(z^α) = Σ α_i ω(x_i)."""
    valuations = basis.valuations if isinstance(basis, OrderedBasis) else tuple(basis)
    if len(alpha) != len(valuations):
        raise ValueError(f"multi-index of length {len(alpha)} against a basis of rank {len(valuations)}")
    if any(a < 0 for a in alpha):
        raise ValueError("multi-index entries must be non-negative")
    return sum((a * Fraction(w) for a, w in zip(alpha, valuations)), Fraction(0))
