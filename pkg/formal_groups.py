# formal_groups.py
# ------------------------------------------------------------
# Truncated formal group laws with integer coefficients and the standard
# groups they define on m^n for a ring of integers R.
# • FormalGroupLaw: n-tuple of polynomials in X_1..X_n, Y_1..Y_n (degree <= D)
# • fgl_multiply / StandardGroup: group law evaluated exactly mod π^N
# • p_power_decomposition: f_p = p(X + φ) + ψ with ord φ >= 2, ord ψ >= p
# • saturation_subgroup: H = G_{ρ/e}, the part where ω(x^p) = ω(x) + 1
# • FGL text format (header + monomial lines)
# ------------------------------------------------------------
from __future__ import annotations

import logging
import random
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from pathlib import Path
from typing import Mapping, Optional, Sequence

import sympy

import config
from errors import BudgetExceeded, ConstructionError, InsufficientPrecision
from filtered import FilteredGroup
from padic_core import Digits, PAdicScalar, RingSpec

log = logging.getLogger("lazardlab.formal_groups")

Term = tuple[tuple[int, ...], int]


def _normalize_component(component: Mapping[Sequence[int], int], nvars: int) -> tuple[Term, ...]:
    out = {}
    for exps, coeff in component.items():
        exps = tuple(int(a) for a in exps)
        if len(exps) != nvars or any(a < 0 for a in exps):
            raise ValueError(f"exponent vector {exps} does not have {nvars} non-negative entries")
        if coeff:
            out[exps] = out.get(exps, 0) + int(coeff)
    return tuple(sorted((k, v) for k, v in out.items() if v))


@dataclass(frozen=True)
class FormalGroupLaw:
    n_vars: int
    components: tuple[tuple[Term, ...], ...]
    ring: RingSpec
    degree: int = 0  # truncation degree D; 0 picks max(p, N·e)
    exact: bool = True  # the polynomials are the whole law, not a truncation

    @classmethod
    def from_components(cls, ring: RingSpec, components: Sequence[Mapping], degree: Optional[int] = None,
                        exact: bool = True, validate: bool = True) -> "FormalGroupLaw":
        n = len(components)
        comps = tuple(_normalize_component(c, 2 * n) for c in components)
        D = degree if degree else max(ring.p, ring.N * ring.e)
        law = cls(n, comps, ring, D, exact)
        top = law.max_degree
        if exact and top > D:
            raise ValueError(f"law has monomials of degree {top} above the truncation degree {D}")
        if validate:
            law.validate()
        return law

    @classmethod
    def fixture(cls, name: str, ring: RingSpec, degree: Optional[int] = None) -> "FormalGroupLaw":
        spec = config.get_fgl_fixture(name)
        return cls.from_components(ring, spec["components"], degree)

    @property
    def max_degree(self) -> int:
        return max((sum(exps) for comp in self.components for exps, _ in comp), default=0)

    # ---- symbolic view ----
    def symbols(self) -> tuple[tuple[sympy.Symbol, ...], tuple[sympy.Symbol, ...]]:
        X = sympy.symbols(f"X1:{self.n_vars + 1}")
        Y = sympy.symbols(f"Y1:{self.n_vars + 1}")
        return X, Y

    def as_exprs(self, X, Y) -> list[sympy.Expr]:
        args = list(X) + list(Y)
        exprs = []
        for comp in self.components:
            e = sympy.Integer(0)
            for exps, c in comp:
                mono = sympy.Integer(c)
                for v, a in zip(args, exps):
                    if a:
                        mono *= v ** a
                e += mono
            exprs.append(e)
        return exprs

    def validate(self) -> None:
        """Identity and associativity up to the truncation degree."""
        X, Y = self.symbols()
        Z = sympy.symbols(f"Z1:{self.n_vars + 1}")
        gens = list(X) + list(Y) + list(Z)
        F_xy = self.as_exprs(X, Y)
        zero = [sympy.Integer(0)] * self.n_vars
        problems = []
        for i, f in enumerate(F_xy):
            if sympy.expand(f.subs(dict(zip(Y, zero)))) != X[i]:
                problems.append(f"F_{i + 1}(X,0) != X_{i + 1}")
            if sympy.expand(f.subs(dict(zip(X, zero)))) != Y[i]:
                problems.append(f"F_{i + 1}(0,Y) != Y_{i + 1}")
        lhs = _compose(self, _compose(self, list(X), list(Y), gens), list(Z), gens)
        rhs = _compose(self, list(X), _compose(self, list(Y), list(Z), gens), gens)
        for i, (a, b) in enumerate(zip(lhs, rhs)):
            if truncate(sympy.expand(a - b), gens, self.degree) != 0:
                problems.append(f"associativity fails in component {i + 1}")
        if problems:
            raise ConstructionError("Invalid formal group law: " + ", ".join(problems))


def truncate(expr: sympy.Expr, gens: Sequence[sympy.Symbol], degree: int) -> sympy.Expr:
    """Drop monomials of total degree > degree."""
    if expr == 0:
        return sympy.Integer(0)
    poly = sympy.Poly(expr, *gens)
    kept = [(m, c) for m, c in poly.terms() if sum(m) <= degree]
    if not kept:
        return sympy.Integer(0)
    return sympy.Poly.from_dict(dict(kept), *gens).as_expr()


def _compose(F: FormalGroupLaw, left: Sequence, right: Sequence, gens) -> list[sympy.Expr]:
    X, Y = F.symbols()
    subs = dict(zip(X, left))
    subs.update(zip(Y, right))
    return [truncate(sympy.expand(e.xreplace(subs)), gens, F.degree) for e in F.as_exprs(X, Y)]


# --------------- evaluation at precision ---------------
def _check_truncation(F: FormalGroupLaw, ring: RingSpec) -> None:
    if not F.exact and F.degree < ring.N * ring.e:
        raise BudgetExceeded("formal group truncation degree", F.degree, ring.N * ring.e)


def evaluate_law(F: FormalGroupLaw, ring: RingSpec, x: Sequence[Digits], y: Sequence[Digits]) -> tuple[Digits, ...]:
    values = list(x) + list(y)
    cache: dict[tuple[int, int], Digits] = {}

    def power(var: int, a: int) -> Digits:
        if (var, a) not in cache:
            cache[(var, a)] = values[var] if a == 1 else ring.mul(power(var, a - 1), values[var])
        return cache[(var, a)]

    out = []
    for comp in F.components:
        acc = ring.zero()
        for exps, c in comp:
            term = ring.from_int(c)
            for var, a in enumerate(exps):
                if a:
                    term = ring.mul(term, power(var, a))
            acc = ring.add(acc, term)
        out.append(acc)
    return tuple(out)


@dataclass(frozen=True)
class StandardGroupPoint:
    coords: tuple[Digits, ...]

    def __getitem__(self, i: int) -> Digits:
        return self.coords[i]


def fgl_multiply(F: FormalGroupLaw, x: StandardGroupPoint, y: StandardGroupPoint,
                 ring: Optional[RingSpec] = None) -> StandardGroupPoint:
    ring = ring or F.ring
    _check_truncation(F, ring)
    return StandardGroupPoint(evaluate_law(F, ring, x.coords, y.coords))


class StandardGroup(FilteredGroup):
    """
    m^n with the group law F; ω(x) = min_i v(x_i).
    Z_p-coordinates are the π-adic digits of every x_i, so digit d carries weight d/e.
    """

    def __init__(self, F: FormalGroupLaw, level: int = 1, ring: Optional[RingSpec] = None, name: str = ""):
        ring = ring or F.ring
        _check_truncation(F, ring)
        if level < 1:
            raise ValueError("standard groups live on m^n: level must be >= 1")
        self.law = F
        self.level = level
        weights = [Fraction(d, ring.e) for _ in range(F.n_vars) for d in range(ring.e)]
        caps = [k for _ in range(F.n_vars) for k in ring.digit_precision]
        super().__init__(ring, weights, caps, Fraction(level, ring.e),
                         name or f"std(n={F.n_vars}, level={level}, {ring.label()})")

    def coordinates(self, x: StandardGroupPoint) -> tuple[int, ...]:
        return tuple(a for c in x.coords for a in c)

    def from_coordinates(self, a: Sequence[int]) -> StandardGroupPoint:
        e = self.e
        return StandardGroupPoint(tuple(self.ring.reduce(a[i * e:(i + 1) * e]) for i in range(self.law.n_vars)))

    def point(self, values: Sequence) -> StandardGroupPoint:
        """Point from R-elements given as ints or digit lists."""
        return StandardGroupPoint(tuple(PAdicScalar.of(self.ring, v).coeffs for v in values))

    def identity(self) -> StandardGroupPoint:
        return StandardGroupPoint((self.ring.zero(),) * self.law.n_vars)

    def multiply(self, x, y):
        return StandardGroupPoint(evaluate_law(self.law, self.ring, x.coords, y.coords))

    def invert(self, x):
        # y <- y - F(x, y); the linear part of F is X + Y, so each step gains >= 1/e
        ring = self.ring
        y = tuple(ring.neg(c) for c in x.coords)
        for _ in range(ring.N + 2):
            r = evaluate_law(self.law, ring, x.coords, y)
            if all(ring.is_zero(c) for c in r):
                return StandardGroupPoint(y)
            y = tuple(ring.sub(a, b) for a, b in zip(y, r))
        raise ConstructionError(f"inverse iteration did not converge for {self.describe(x)}")


# --------------- p-power series ---------------
@dataclass(frozen=True)
class PPowerDecomposition:
    f_p: tuple[sympy.Expr, ...]
    phi: tuple[sympy.Expr, ...]
    psi: tuple[sympy.Expr, ...]
    variables: tuple[sympy.Symbol, ...]


def _order(expr: sympy.Expr, gens) -> Optional[int]:
    if expr == 0:
        return None
    return min(sum(m) for m, _ in sympy.Poly(expr, *gens).terms())


def p_power_decomposition(F: FormalGroupLaw, p: Optional[int] = None) -> PPowerDecomposition:
    """[p](X) split as p·(X + φ(X)) + ψ(X) by divisibility of coefficients."""
    p = p or F.ring.p
    if F.degree < p:
        raise BudgetExceeded("truncation degree for the p-power series", F.degree, p)
    X, _ = F.symbols()
    gens = list(X)
    acc = list(X)
    for _ in range(p - 1):
        acc = _compose(F, acc, list(X), gens)
    phi, psi = [], []
    for i, f in enumerate(acc):
        poly = sympy.Poly(f, *gens) if f != 0 else None
        phi_terms, psi_terms = {}, {}
        for m, c in (poly.terms() if poly is not None else []):
            c = int(c)
            if sum(m) == 1:
                expected = p if m == tuple(1 if j == i else 0 for j in range(len(gens))) else 0
                if c != expected:
                    raise ConstructionError(f"linear part of [p] is not p·X in component {i + 1}")
                continue
            b = c % p
            a = (c - b) // p
            if a:
                phi_terms[m] = a
            if b:
                psi_terms[m] = b
        phi.append(sympy.Poly.from_dict(phi_terms, *gens).as_expr() if phi_terms else sympy.Integer(0))
        psi.append(sympy.Poly.from_dict(psi_terms, *gens).as_expr() if psi_terms else sympy.Integer(0))
    for i, (a, b) in enumerate(zip(phi, psi)):
        oa, ob = _order(a, gens), _order(b, gens)
        if oa is not None and oa < 2:
            raise ConstructionError(f"ord(φ_{i + 1}) = {oa} < 2")
        if ob is not None and ob < p:
            raise ConstructionError(f"ord(ψ_{i + 1}) = {ob} < {p}")
    return PPowerDecomposition(tuple(acc), tuple(phi), tuple(psi), tuple(X))


# --------------- saturation subgroup ---------------
def saturation_subgroup(F: FormalGroupLaw, samples: Optional[int] = None, seed: Optional[int] = None) -> StandardGroup:
    """H = {x : ω(x) > 1/(p-1)} = G_{ρ/e}; ω(x^p) = ω(x) + 1 is checked on samples."""
    ring = F.ring
    H = StandardGroup(F, level=ring.rho, name=f"H(n={F.n_vars}, ρ={ring.rho}, {ring.label()})")
    rng = random.Random(config.DEFAULT_SEED if seed is None else seed)
    n = config.FILTRATION_SAMPLES if samples is None else samples
    for _ in range(n):
        x = H.random_element(rng)
        w = H.omega(x)
        if w + 1 >= H.bottom:
            continue
        if H.omega(H.power(x, ring.p)) != w + 1:
            raise ConstructionError(f"ω(x^p) != ω(x)+1 on the saturation subgroup at {H.describe(x)}")
    log.info("[formal_groups] %s: level ρ=%d, equi-p-valued=%s", H.name, ring.rho, ring.e == 1)
    return H


def is_equi_p_valued_saturation(F: FormalGroupLaw) -> bool:
    return F.ring.e == 1


@dataclass(frozen=True)
class PowerMapCheck:
    source_level: Fraction
    truncation: Fraction
    size: int
    injective: bool
    lands_in_target: bool

    @property
    def bijective(self) -> bool:
        return self.injective and self.lands_in_target


def check_p_power_bijection(H: StandardGroup, lam: Fraction) -> PowerMapCheck:
    """
    x -> x^p as a map H_lam/H_mu -> H_{lam+1}/H_{mu+1} with mu one below the precision floor.
    Both sides have the same size, so injectivity plus landing in the target is bijectivity.
    """
    lam = Fraction(lam)
    mu = H.bottom - 1
    if mu <= lam:
        raise InsufficientPrecision(f"p-power check at λ={lam} needs a floor above {lam + 1}",
                                    int((lam + 2) * H.e) + 1)
    lo = [H.lo(j, lam) for j in range(H.rank)]
    hi = [min(H.lo(j, mu), H.caps[j]) for j in range(H.rank)]
    size = 1
    for a, b in zip(lo, hi):
        size *= H.p ** max(0, b - a)
    if size > config.GR_ENUM_CAP:
        raise BudgetExceeded(f"p-power enumeration on H_{lam}", config.GR_ENUM_CAP, size)
    target_lo = [H.lo(j, lam + 1) for j in range(H.rank)]
    target_hi = [min(H.lo(j, mu + 1), H.caps[j]) for j in range(H.rank)]
    seen = set()
    lands = True
    ranges = [range(H.p ** max(0, b - a)) for a, b in zip(lo, hi)]
    for digits in product(*ranges):
        x = H.from_coordinates([d * H.p ** a for d, a in zip(digits, lo)])
        y = H.coordinates(H.power(x, H.p))
        if any(c % H.p ** t for c, t in zip(y, target_lo)):
            lands = False
        seen.add(tuple(c % H.p ** t for c, t in zip(y, target_hi)))
    return PowerMapCheck(lam, mu, size, len(seen) == size, lands)


# --------------- text format ---------------
_HEADER_KEYS = ("p", "e", "eisenstein_poly", "n_vars", "D")


def format_fgl_text(F: FormalGroupLaw) -> str:
    ring = F.ring
    lines = [
        f"p = {ring.p}",
        f"e = {ring.e}",
        "eisenstein_poly = " + " ".join(str(c) for c in ring.eisenstein_poly),
        f"n_vars = {F.n_vars}",
        f"D = {F.degree}",
        f"precision_N = {ring.N}",
    ]
    for i, comp in enumerate(F.components):
        for exps, c in comp:
            lines.append(" ".join([str(i)] + [str(a) for a in exps] + [str(c)]))
    return "\n".join(lines) + "\n"


def parse_fgl_text(text: str, validate: bool = True) -> FormalGroupLaw:
    header: dict[str, str] = {}
    monomials: list[list[int]] = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" in line:
            key, value = (s.strip() for s in line.split("=", 1))
            header[key] = value
        else:
            monomials.append([int(t) for t in line.split()])
    missing = [k for k in _HEADER_KEYS if k not in header]
    if missing:
        raise ValueError("FGL file is missing header fields: " + ", ".join(missing))
    n = int(header["n_vars"])
    ring = RingSpec(p=int(header["p"]), e=int(header["e"]),
                    eisenstein_poly=tuple(int(t) for t in header["eisenstein_poly"].split()),
                    precision_N=int(header.get("precision_N", config.DEFAULT_PRECISION)))
    components: list[dict] = [{} for _ in range(n)]
    for row in monomials:
        if len(row) != 2 * n + 2:
            raise ValueError(f"monomial line {row} should hold index, {2 * n} exponents and a coefficient")
        idx, exps, c = row[0], tuple(row[1:-1]), row[-1]
        if not 0 <= idx < n:
            raise ValueError(f"variable index {idx} out of range 0..{n - 1}")
        components[idx][exps] = components[idx].get(exps, 0) + c
    return FormalGroupLaw.from_components(ring, components, int(header["D"]), validate=validate)


def read_fgl_file(path: str | Path) -> FormalGroupLaw:
    return parse_fgl_text(Path(path).read_text(encoding="utf-8"))
