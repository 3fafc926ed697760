# lazmap.py
# ------------------------------------------------------------
# The Lazard morphism on polynomially truncated analytic cochains.
# • Chart: offset coordinates u_j = a_j / p^{base_j} of a matrix group,
#   in which the group law is an exact quadratic polynomial
# • AnalyticCochain / bar_differential_analytic: sympy polynomials in n·d
#   chart variables with the inhomogeneous bar differential
# • lazard_phi: multilinear part, antisymmetrized into Λ^n of the dual
# • chain_map_check / cup_compatible: Φ∘d_bar = d_CE∘Φ and Φ(f∪g) = Φf∧Φg
# • cochain text format
# ------------------------------------------------------------
from __future__ import annotations

import logging
import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations, permutations
from math import comb
from pathlib import Path
from typing import Optional, Sequence, Union

import numpy as np
import sympy

import config
from errors import BudgetExceeded, ConstructionError
from lazard_lie import LieLattice
from lie_cohom import CEComplex, is_coboundary, wedge
from pgroups import MatrixCongruenceGroup

log = logging.getLogger("lazardlab.lazmap")


def _symbol(k: int, j: int) -> sympy.Symbol:
    return sympy.Symbol(f"t{k}_{j}")


def chart_symbols(arity: int, d: int) -> list[list[sympy.Symbol]]:
    return [[_symbol(k, j) for j in range(d)] for k in range(arity)]


def _flat(arity: int, d: int) -> list[sympy.Symbol]:
    return [s for block in chart_symbols(arity, d) for s in block]


def _permutation_sign(perm: Sequence[int]) -> int:
    inv = sum(1 for a in range(len(perm)) for b in range(a + 1, len(perm)) if perm[a] > perm[b])
    return -1 if inv % 2 else 1


# --------------- chart ---------------
class Chart:
    """
    g = 1 + Σ_j p^{base_j} u_j B_j. The product is
    u''_m = u_m + u'_m + Σ_{j,l} T[j,l,m]·p^{base_j + base_l - base_m}·u_j u'_l.
    """

    def __init__(self, G: MatrixCongruenceGroup):
        self.G = G
        self.p = G.p
        self.d = G.rank
        self.base = tuple(int(b) for b in G.floor_exponents())
        T = G.structure_tensor
        law: list[dict[tuple[int, int], sympy.Rational]] = [dict() for _ in range(self.d)]
        for j, l, m in zip(*np.nonzero(T)):
            j, l, m = int(j), int(l), int(m)
            law[m][(j, l)] = int(T[j, l, m]) * sympy.Rational(self.p) ** (self.base[j] + self.base[l] - self.base[m])
        self.law = law

    @property
    def name(self) -> str:
        return self.G.name

    def product(self, X: Sequence, Y: Sequence) -> list:
        return [X[m] + Y[m] + sum(c * X[j] * Y[l] for (j, l), c in self.law[m].items())
                for m in range(self.d)]

    def ring_product(self, X: Sequence, Y: Sequence) -> list:
        """Coordinates of X·Y (no unit terms)."""
        return [sum(c * X[j] * Y[l] for (j, l), c in self.law[m].items()) for m in range(self.d)]

    def log_coordinates(self, X: Sequence, degree: int) -> list:
        """Coordinates of log(1 + X) in the same frame, truncated at total degree `degree`."""
        gens = sorted(set().union(*(sympy.sympify(x).free_symbols for x in X)), key=str)
        total = [sympy.Integer(0)] * self.d
        power = list(X)
        for k in range(1, degree + 1):
            total = [t + sympy.Rational((-1) ** (k + 1), k) * w for t, w in zip(total, power)]
            power = [sympy.expand(v) for v in self.ring_product(power, X)]
        return [_truncate(sympy.expand(t), gens, degree) for t in total]

    @cached_property
    def lattice(self) -> LieLattice:
        """Tangent Lie algebra at the identity in the frame p^{base_j}·B_j."""
        constants = []
        for i, j in combinations(range(self.d), 2):
            for m in range(self.d):
                c = self.law[m].get((i, j), 0) - self.law[m].get((j, i), 0)
                if not c:
                    continue
                if not sympy.Rational(c).is_integer:
                    raise ConstructionError(f"chart bracket [{i},{j}] -> {m} = {c} is not integral on {self.name}")
                constants.append(((i, j, m), int(c)))
        L = LieLattice(self.d, tuple(constants), None, tuple(self.G.weights[j] + self.base[j] for j in range(self.d)),
                       self.p, f"chart({self.name})")
        L.check_jacobi()
        return L

    def point(self, x) -> list[int]:
        """Chart coordinates of a group element (exact modulo p^{cap_j - base_j})."""
        out = []
        for a, b, k in zip(self.G.coordinates(x), self.base, self.G.caps):
            a %= self.p ** k
            if a % self.p ** b:
                raise ValueError(f"{self.G.describe(x)} is not in the group")
            out.append(a // self.p ** b)
        return out

    def element(self, u: Sequence[int]):
        return self.G.from_coordinates([int(a) * self.p ** b for a, b in zip(u, self.base)])


# --------------- cochains ---------------
@dataclass(frozen=True)
class AnalyticCochain:
    """Polynomial in t{k}_{j} (block k = argument k), kept up to total degree `degree`."""
    arity: int
    d: int
    poly: sympy.Expr
    degree: int

    def __post_init__(self):
        problems = []
        if self.arity < 0:
            problems.append(f"arity {self.arity} < 0")
        if self.d < 1:
            problems.append(f"variable count {self.d} < 1")
        if self.degree < 0:
            problems.append(f"truncation degree {self.degree} < 0")
        expr = sympy.expand(sympy.sympify(self.poly))
        allowed = set(_flat(self.arity, self.d))
        stray = sorted(str(s) for s in expr.free_symbols - allowed)
        if stray:
            problems.append(f"unknown variables {stray}")
        if problems:
            raise ValueError("Invalid AnalyticCochain: " + ", ".join(problems))
        object.__setattr__(self, "poly", _truncate(expr, _flat(self.arity, self.d), self.degree))

    @property
    def gens(self) -> list[sympy.Symbol]:
        return _flat(self.arity, self.d)

    def terms(self) -> list[tuple[tuple[int, ...], sympy.Rational]]:
        if self.poly == 0:
            return []
        if not self.gens:
            return [((), sympy.Rational(self.poly))]
        return sympy.Poly(self.poly, *self.gens).terms()

    def is_zero(self) -> bool:
        return self.poly == 0

    def is_normalized(self) -> bool:
        for k in range(self.arity):
            if sympy.expand(self.poly.xreplace({s: 0 for s in chart_symbols(self.arity, self.d)[k]})) != 0:
                return False
        return True

    def evaluate(self, points: Sequence[Sequence]) -> sympy.Expr:
        if len(points) != self.arity:
            raise ValueError(f"{len(points)} arguments for arity {self.arity}")
        subs = {_symbol(k, j): sympy.sympify(points[k][j]) for k in range(self.arity) for j in range(self.d)}
        return sympy.expand(self.poly.xreplace(subs))

    def __add__(self, other: "AnalyticCochain") -> "AnalyticCochain":
        if (self.arity, self.d) != (other.arity, other.d):
            raise ValueError("cochains of different shapes")
        return AnalyticCochain(self.arity, self.d, self.poly + other.poly, min(self.degree, other.degree))

    def scale(self, c) -> "AnalyticCochain":
        return AnalyticCochain(self.arity, self.d, c * self.poly, self.degree)


def _truncate(expr: sympy.Expr, gens: list, degree: int) -> sympy.Expr:
    if expr == 0 or not gens:
        return expr
    P = sympy.Poly(expr, *gens)
    if P.total_degree() <= degree:
        return expr
    kept = [(m, c) for m, c in P.terms() if sum(m) <= degree]
    return sympy.Poly.from_dict(dict(kept), *gens).as_expr() if kept else sympy.Integer(0)


def coordinate_cochain(d: int, j: int, degree: int = 2) -> AnalyticCochain:
    return AnalyticCochain(1, d, _symbol(0, j), degree)


def log_coordinate_cochain(chart: Chart, j: int, degree: int = 4) -> AnalyticCochain:
    """g ↦ coordinate j of log(g): a homomorphism, hence a 1-cocycle, when G is abelian."""
    X = chart_symbols(1, chart.d)[0]
    return AnalyticCochain(1, chart.d, chart.log_coordinates(X, degree)[j], degree)


def constant_cochain(d: int, value, degree: int = 1) -> AnalyticCochain:
    return AnalyticCochain(0, d, sympy.sympify(value), degree)


def random_cochain(d: int, arity: int, max_degree: int, rng: random.Random, terms: int = 4) -> AnalyticCochain:
    """Normalized random polynomial: every monomial touches every argument."""
    if arity == 0:
        return constant_cochain(d, rng.choice([c for c in range(-4, 5) if c]), max(1, max_degree))
    if max_degree < arity:
        raise ValueError(f"max_degree {max_degree} < arity {arity}")
    blocks = chart_symbols(arity, d)
    poly = sympy.Integer(0)
    for _ in range(terms):
        mono = [rng.choice(b) for b in blocks]
        for _ in range(rng.randint(0, max_degree - arity)):
            mono.append(rng.choice(rng.choice(blocks)))
        poly += rng.choice([c for c in range(-4, 5) if c]) * sympy.Mul(*mono)
    return AnalyticCochain(arity, d, poly, max(max_degree, arity + 1))


def permute_arguments(f: AnalyticCochain, perm: Sequence[int]) -> AnalyticCochain:
    """f'(g_0..g_{n-1}) = f(g_{perm[0]}, ..., g_{perm[n-1]})."""
    if sorted(perm) != list(range(f.arity)):
        raise ValueError(f"{list(perm)} is not a permutation of {f.arity} arguments")
    subs = {_symbol(k, j): _symbol(perm[k], j) for k in range(f.arity) for j in range(f.d)}
    return AnalyticCochain(f.arity, f.d, f.poly.xreplace(subs), f.degree)


def analytic_cup(f: AnalyticCochain, g: AnalyticCochain) -> AnalyticCochain:
    """(f∪g)(g_0..g_{a+b-1}) = f(g_0..g_{a-1})·g(g_a..g_{a+b-1})."""
    if f.d != g.d:
        raise ValueError("cochains on different charts")
    shift = {_symbol(k, j): _symbol(k + f.arity, j) for k in range(g.arity) for j in range(g.d)}
    return AnalyticCochain(f.arity + g.arity, f.d, f.poly * g.poly.xreplace(shift), f.degree + g.degree)


# --------------- bar differential ---------------
def bar_differential_analytic(f: AnalyticCochain, chart: Chart) -> AnalyticCochain:
    """
    (df)(g_0..g_n) = f(g_1..g_n) + Σ_{i=1..n} (-1)^i f(.., g_{i-1}g_i, ..) + (-1)^{n+1} f(g_0..g_{n-1}),
    trivial coefficients, truncated at f.degree.
    """
    n, d = f.arity, f.d
    if d != chart.d:
        raise ValueError(f"cochain has {d} variables per argument, chart has {chart.d}")
    if f.degree < n + 1:
        raise BudgetExceeded("truncation degree", f.degree, n + 1)
    src = chart_symbols(n, d)
    dst = chart_symbols(n + 1, d)

    def substituted(blocks: list[list]) -> sympy.Expr:
        subs = {src[k][j]: blocks[k][j] for k in range(n) for j in range(d)}
        return f.poly.xreplace(subs)

    total = substituted(dst[1:])
    for i in range(1, n + 1):
        merged = chart.product(dst[i - 1], dst[i])
        total += (-1) ** i * substituted(dst[:i - 1] + [merged] + dst[i + 1:])
    total += (-1) ** (n + 1) * substituted(dst[:n])
    return AnalyticCochain(n + 1, d, sympy.expand(total), f.degree)


# --------------- Φ ---------------
@dataclass(frozen=True)
class LieCochain:
    """Alternating n-form on the chart Lie algebra, values on e_I for increasing I."""
    degree: int
    rank: int
    values: tuple

    def __post_init__(self):
        if len(self.values) != comb(self.rank, self.degree):
            raise ValueError(f"{len(self.values)} values for Λ^{self.degree} of rank {self.rank}")

    def vector(self) -> np.ndarray:
        return np.array(list(self.values), dtype=object)

    def is_zero(self) -> bool:
        return not any(self.values)

    def support(self) -> dict[tuple[int, ...], sympy.Rational]:
        return {I: v for I, v in zip(combinations(range(self.rank), self.degree), self.values) if v}

    def is_integral(self) -> bool:
        return all(sympy.Rational(v).is_integer for v in self.values)

    def to_dict(self) -> dict:
        return {"degree": self.degree, "rank": self.rank,
                "support": [[list(I), str(v)] for I, v in self.support().items()]}


def multilinear_part(f: AnalyticCochain) -> dict[tuple[int, ...], sympy.Rational]:
    """Coefficient of t0_{j_0}·t1_{j_1}···t{n-1}_{j_{n-1}}, keyed by (j_0..j_{n-1})."""
    n, d = f.arity, f.d
    out: dict[tuple[int, ...], sympy.Rational] = {}
    for mono, c in f.terms():
        if sum(mono) != n:
            continue
        key = []
        for k in range(n):
            block = mono[k * d:(k + 1) * d]
            if sum(block) != 1:
                break
            key.append(block.index(1))
        else:
            out[tuple(key)] = sympy.Rational(c)
    return out


def lazard_phi(f: AnalyticCochain) -> LieCochain:
    """Φ(f)(e_I) = Σ_σ sign(σ)·M[I_σ], M the multilinear part (no 1/n!)."""
    n, d = f.arity, f.d
    M = multilinear_part(f)
    values = []
    for I in combinations(range(d), n):
        total = sympy.Integer(0)
        for perm in permutations(range(n)):
            c = M.get(tuple(I[s] for s in perm))
            if c:
                total += _permutation_sign(perm) * c
        values.append(total)
    return LieCochain(n, d, tuple(values))


def ce_differential(chart: Chart, phi: LieCochain) -> LieCochain:
    C = exact_complex(chart)
    out = C.apply(phi.degree, phi.vector())
    return LieCochain(phi.degree + 1, phi.rank, tuple(sympy.sympify(v) for v in out))


_COMPLEXES: dict[str, CEComplex] = {}


def exact_complex(chart: Chart) -> CEComplex:
    key = repr((chart.name, chart.lattice.constants))
    if key not in _COMPLEXES:
        _COMPLEXES[key] = CEComplex(chart.lattice)
    return _COMPLEXES[key]


# --------------- checks ---------------
@dataclass
class ChainMapVerdict:
    group: str
    samples: int
    arities: tuple[int, ...]
    seed: int
    failures: list[dict] = field(default_factory=list)

    @property
    def holds(self) -> bool:
        return not self.failures

    def to_dict(self) -> dict:
        return {"group": self.group, "samples": self.samples, "arities": list(self.arities),
                "seed": self.seed, "holds": self.holds, "failures": self.failures}


def _chain_map_sample(chart: Chart, f: AnalyticCochain) -> Optional[dict]:
    lhs = lazard_phi(bar_differential_analytic(f, chart))
    rhs = ce_differential(chart, lazard_phi(f))
    if tuple(sympy.expand(a - b) for a, b in zip(lhs.values, rhs.values)) == (0,) * len(lhs.values):
        return None
    return {"cochain": format_cochain_text(f), "phi_of_bar": lhs.to_dict(), "ce_of_phi": rhs.to_dict()}


def chain_map_check(chart: Chart, samples: int = 50, arities: Sequence[int] = (1, 2), max_degree: int = 3,
                    seed: Optional[int] = None, cochains: Sequence[AnalyticCochain] = (),
                    workers: Optional[int] = None) -> ChainMapVerdict:
    """Φ(d_bar f) == d_CE(Φ f) on explicit cochains plus `samples` random ones."""
    seed = config.DEFAULT_SEED if seed is None else seed
    rng = random.Random(seed)
    pool = list(cochains)
    for t in range(samples):
        n = arities[t % len(arities)]
        pool.append(random_cochain(chart.d, n, max(max_degree, n + 1), rng))
    exact_complex(chart)
    with ThreadPoolExecutor(max_workers=workers or config.WORKERS) as ex:
        results = list(ex.map(lambda f: _chain_map_sample(chart, f), pool))
    verdict = ChainMapVerdict(chart.name, len(pool), tuple(arities), seed, [r for r in results if r is not None])
    for bad in verdict.failures:
        log.error("[lazmap] chain-map counterexample on %s:\n%s", chart.name, bad["cochain"])
    log.info("[lazmap] chain map on %s: %d cochains, %d failures", chart.name, len(pool), len(verdict.failures))
    return verdict


def cup_compatible(chart: Chart, f: AnalyticCochain, g: AnalyticCochain) -> bool:
    lhs = lazard_phi(analytic_cup(f, g))
    C = exact_complex(chart)
    rhs = wedge(C, lazard_phi(f).vector(), f.arity, lazard_phi(g).vector(), g.arity)
    return all(sympy.expand(a - b) == 0 for a, b in zip(lhs.values, rhs))


@dataclass
class PhiReport:
    group: str
    arity: int
    bar_cocycle: bool
    phi: LieCochain
    d_phi: LieCochain
    nonzero_mod_p: Optional[bool]

    def to_dict(self) -> dict:
        return {"group": self.group, "arity": self.arity, "bar_cocycle": self.bar_cocycle,
                "phi": self.phi.to_dict(), "d_phi": self.d_phi.to_dict(), "nonzero_mod_p": self.nonzero_mod_p}


def phi_report(chart: Chart, f: AnalyticCochain) -> PhiReport:
    """Φ(f), its CE differential, and whether its class survives modulo p (None when Φ(f) is not integral)."""
    phi = lazard_phi(f)
    d_phi = ce_differential(chart, phi)
    cocycle = bar_differential_analytic(f, chart).is_zero() if f.degree >= f.arity + 1 else False
    nonzero = None
    if phi.is_integral() and d_phi.is_zero():
        C = CEComplex(chart.lattice, modulus=chart.p)
        vec = np.array([int(v) % chart.p for v in phi.values], dtype=object)
        nonzero = any(vec) and not is_coboundary(C, f.arity, vec)
    return PhiReport(chart.name, f.arity, cocycle, phi, d_phi, nonzero)


# --------------- text format ---------------
# arity n / vars d / degree D header lines, then "coeff e_0 ... e_{n·d-1}" per monomial.
def format_cochain_text(f: AnalyticCochain) -> str:
    lines = [f"arity {f.arity}", f"vars {f.d}", f"degree {f.degree}"]
    for mono, c in sorted(f.terms()):
        lines.append(" ".join([str(c), *(str(e) for e in mono)]))
    return "\n".join(lines) + "\n"


def parse_cochain_text(text: str, source: str = "text") -> AnalyticCochain:
    header: dict[str, int] = {}
    rows: list[list[str]] = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if parts[0] in ("arity", "vars", "degree"):
            if len(parts) != 2:
                raise ValueError(f"{source}: malformed header line '{line}'")
            header[parts[0]] = int(parts[1])
        else:
            rows.append(parts)
    missing = [k for k in ("arity", "vars") if k not in header]
    if missing:
        raise ValueError(f"{source}: missing header lines: " + ", ".join(missing))
    n, d = header["arity"], header["vars"]
    gens = _flat(n, d)
    poly = sympy.Integer(0)
    top = 0
    for parts in rows:
        if len(parts) != 1 + n * d:
            raise ValueError(f"{source}: expected {1 + n * d} fields, got {len(parts)} in '{' '.join(parts)}'")
        exps = [int(e) for e in parts[1:]]
        if any(e < 0 for e in exps):
            raise ValueError(f"{source}: negative exponent in '{' '.join(parts)}'")
        top = max(top, sum(exps))
        poly += sympy.Rational(parts[0]) * sympy.Mul(*[g ** e for g, e in zip(gens, exps)])
    return AnalyticCochain(n, d, poly, header.get("degree", max(top, n + 1)))


def read_cochain_file(path: Union[str, Path]) -> AnalyticCochain:
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"cochain file not found: {path}")
    return parse_cochain_text(path.read_text(encoding="utf-8"), str(path))


def heisenberg_cocycle(d: int = 3) -> AnalyticCochain:
    """(g, g') ↦ u_0(g)·u_2(g'), the two off-centre coordinates of the unipotent 3×3 chart."""
    return AnalyticCochain(2, d, _symbol(0, 0) * _symbol(1, 2), 3)
