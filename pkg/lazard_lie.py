# lazard_lie.py
# ------------------------------------------------------------
# The integral Lazard Lie lattice of a matrix congruence group.
# • LieLattice: structure constants in the frame δ_i = log(x_i) of an
#   ordered basis, exact or modulo p^k, with a text format
# • lazard_lie / check_lattice_identity: build the lattice from matrix
#   logarithms and compare it with p^r·Lie(G)
# • LieModule / induced_module: Lie actions log ρ(x_i) of a group action
#   landing in 1 + p·End(M); adjoint and determinant actions ship here
# ------------------------------------------------------------
from __future__ import annotations

import logging
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Callable, Optional, Sequence, Union

import numpy as np
import sympy

import config
from errors import ConstructionError, HypothesisFailure, InsufficientPrecision
from filtered import FilteredGroup, OrderedBasis, find_ordered_basis, groupring_valuation
from padic_core import PAdicMatrix, RingSpec, matrix_exp, matrix_log
from pgroups import MatrixCongruenceGroup, smallest_nonresidue
from snf_engine import LinearSolver, prime_power, rank_mod_p, vp_local

log = logging.getLogger("lazardlab.lazard_lie")

Bracket = tuple[tuple[int, int, int], int]


# --------------- lattices ---------------
@dataclass(frozen=True)
class LieLattice:
    """
    Free Z_p-module with basis e_0..e_{d-1} and [e_i, e_j] = Σ_k c_ij^k e_k.
    constants keeps i < j and nonzero c only; modulus None means exact integers.
    """
    rank: int
    constants: tuple[Bracket, ...] = ()
    modulus: Optional[int] = None
    valuations: tuple[Fraction, ...] = ()
    p: Optional[int] = None
    provenance: str = ""
    log_basis: tuple = field(default=(), compare=False, repr=False)

    def __post_init__(self):
        problems = []
        if self.rank < 0:
            problems.append(f"rank {self.rank} < 0")
        p = self.p
        if self.modulus is not None:
            try:
                mp, _ = prime_power(self.modulus)
            except ValueError as e:
                problems.append(str(e))
                mp = None
            if p is None:
                p = mp
            elif mp is not None and mp != p:
                problems.append(f"modulus {self.modulus} is not a power of p={p}")
        merged: dict[tuple[int, int, int], int] = {}
        for (i, j, k), c in self.constants:
            i, j, k, c = int(i), int(j), int(k), int(c)
            if not (0 <= i < self.rank and 0 <= j < self.rank and 0 <= k < self.rank):
                problems.append(f"bracket index ({i},{j},{k}) out of range for rank {self.rank}")
                continue
            if i == j:
                if c:
                    problems.append(f"[e_{i}, e_{i}] must vanish")
                continue
            if i > j:
                i, j, c = j, i, -c
            merged[(i, j, k)] = merged.get((i, j, k), 0) + c
        vals = tuple(Fraction(v) for v in self.valuations)
        if vals and len(vals) != self.rank:
            problems.append(f"{len(vals)} valuations for rank {self.rank}")
        if problems:
            raise ValueError("Invalid LieLattice: " + ", ".join(problems))
        if self.modulus is not None:
            cleaned = {key: c % self.modulus for key, c in merged.items() if c % self.modulus}
        else:
            cleaned = {key: c for key, c in merged.items() if c}
        object.__setattr__(self, "constants", tuple(sorted(cleaned.items())))
        object.__setattr__(self, "valuations", vals)
        object.__setattr__(self, "p", p)

    # ---- structure ----
    def structure(self) -> np.ndarray:
        """c[i, j, k] with c[j, i, k] = -c[i, j, k] (object dtype, exact)."""
        d = self.rank
        c = np.zeros((d, d, d), dtype=object)
        for (i, j, k), v in self.constants:
            c[i, j, k] = v
            c[j, i, k] = -v
        return c

    def _reduce(self, arr):
        return arr % self.modulus if self.modulus is not None else arr

    def bracket(self, u: Sequence[int], v: Sequence[int]) -> list[int]:
        c = self.structure()
        u = np.array(list(u), dtype=object)
        v = np.array(list(v), dtype=object)
        out = np.einsum("i,j,ijk->k", u, v, c) if self.rank else np.zeros(0, dtype=object)
        return [int(x) for x in self._reduce(out)]

    def ad(self, i: int) -> np.ndarray:
        """Matrix of ad(e_i): column j holds the coordinates of [e_i, e_j]."""
        return self._reduce(self.structure()[i].T.copy())

    def is_abelian(self) -> bool:
        return not self.constants

    def jacobi_defects(self) -> list[tuple[int, int, int]]:
        c = self.structure()
        d = self.rank
        defects = []
        for i in range(d):
            for j in range(i + 1, d):
                for l in range(j + 1, d):
                    # [[e_i,e_j],e_l] + [[e_j,e_l],e_i] + [[e_l,e_i],e_j]
                    total = c[i, j] @ c[:, l] + c[j, l] @ c[:, i] + c[l, i] @ c[:, j]
                    if any(int(x) for x in self._reduce(total)):
                        defects.append((i, j, l))
        return defects

    def check_jacobi(self) -> None:
        defects = self.jacobi_defects()
        if defects:
            raise ConstructionError(f"Jacobi identity fails for {self.provenance or 'lattice'} at {defects[0]}")

    def reduce(self, modulus: int) -> "LieLattice":
        if self.modulus is not None and self.modulus % modulus:
            raise InsufficientPrecision(f"lattice known modulo {self.modulus}, asked for {modulus}")
        return LieLattice(self.rank, self.constants, modulus, self.valuations, self.p,
                          self.provenance, self.log_basis)

    def divisible_by_p(self) -> bool:
        return all(c % self.p == 0 for _, c in self.constants)

    def to_dict(self) -> dict:
        return {
            "rank": self.rank,
            "modulus": self.modulus,
            "p": self.p,
            "valuations": [str(v) for v in self.valuations],
            "brackets": [[i, j, k, c] for (i, j, k), c in self.constants],
            "provenance": self.provenance,
        }


def lattice_fixture(name: str) -> LieLattice:
    fx = config.get_lattice_fixture(name)
    return LieLattice(int(fx["rank"]), tuple(((i, j, k), c) for i, j, k, c in fx["brackets"]),
                      None, tuple(Fraction(v) for v in fx["valuations"]), int(fx["p"]), f"fixture:{name}")


def quaternion_lattice(p: int) -> LieLattice:
    """Log lattice of 1 + Π·O_D for the quaternion division algebra over Q_p (p odd)."""
    if p < 3:
        raise ValueError("quaternion lattice needs an odd prime")
    c = smallest_nonresidue(p)
    brackets = (((0, 1, 3), -2), ((0, 3, 1), -2 * p), ((1, 3, 0), -2 * p * c))
    vals = (Fraction(1, 2), Fraction(1, 2), Fraction(1), Fraction(1))
    return LieLattice(4, brackets, None, vals, p, f"quaternion units p={p}")


# --------------- text format ---------------
def format_lattice_text(L: LieLattice) -> str:
    lines = [f"{L.rank}"]
    if L.p is not None:
        lines.append(f"p {L.p}")
    if L.modulus is not None:
        lines.append(f"modulus {L.modulus}")
    if L.valuations:
        lines.append("valuations " + " ".join(str(v) for v in L.valuations))
    lines += [f"{i + 1} {j + 1} {k + 1} {c}" for (i, j, k), c in L.constants]
    return "\n".join(lines) + "\n"


def parse_lattice_text(text: str, source: str = "text") -> LieLattice:
    """First line d; then 'p ..', 'modulus ..', 'valuations ..' and 1-based 'i j k c' lines."""
    rank = None
    p = modulus = None
    vals: tuple = ()
    brackets = []
    for n, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        if rank is None:
            if len(tokens) != 1:
                raise ValueError(f"line {n}: expected the rank d, got '{line}'")
            rank = int(tokens[0])
            continue
        head = tokens[0].lower()
        if head == "p":
            p = int(tokens[1])
        elif head == "modulus":
            modulus = int(tokens[1]) or None
        elif head == "valuations":
            vals = tuple(Fraction(t) for t in tokens[1:])
        else:
            if len(tokens) != 4:
                raise ValueError(f"line {n}: expected 'i j k c', got '{line}'")
            i, j, k, c = (int(t) for t in tokens)
            brackets.append(((i - 1, j - 1, k - 1), c))
    if rank is None:
        raise ValueError("empty lattice description")
    return LieLattice(rank, tuple(brackets), modulus, vals, p, source)


def read_lattice_file(path: Union[str, Path]) -> LieLattice:
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"[lazard_lie] lattice file not found: {path}")
    return parse_lattice_text(path.read_text(encoding="utf-8"), source=str(path))


def load_lattice(source: str) -> LieLattice:
    """Fixture name or path to a lattice file."""
    if source.strip().lower() in config.LATTICE_FIXTURES:
        return lattice_fixture(source)
    return read_lattice_file(source)


# --------------- from a group ---------------
def _coordinate_modulus(G: FilteredGroup) -> int:
    return G.p ** min(G.caps)


def _log_coordinates(G: MatrixCongruenceGroup, M: PAdicMatrix) -> list[int]:
    coords = G.coordinates(M)
    if G.from_coordinates(coords) != M:
        raise ConstructionError(f"matrix {M} leaves the coordinate lattice of {G.name}")
    return list(coords)


def lazard_lie(G: MatrixCongruenceGroup, basis: Optional[OrderedBasis] = None) -> LieLattice:
    """Structure constants of the lattice spanned by δ_i = log(x_i) over the ordered basis x_i."""
    basis = basis or find_ordered_basis(G)
    d = basis.rank
    p = G.p
    deltas = [matrix_log(G.matrix(x)) for x in basis.elements]
    q = _coordinate_modulus(G)
    D = np.array([_log_coordinates(G, X) for X in deltas], dtype=object).T % q
    solver = LinearSolver(D, q)
    if solver.exact < 1:
        raise InsufficientPrecision(f"log frame of {G.name} is singular at precision", G.ring.N + G.e)
    brackets = []
    rhs = []
    for i in range(d):
        for j in range(i + 1, d):
            brackets.append((i, j))
            rhs.append(_log_coordinates(G, deltas[i].commutator(deltas[j])))
    constants: list[Bracket] = []
    modulus = p ** solver.exact
    if brackets:
        try:
            X = solver.solve(np.array(rhs, dtype=object).T)
        except ConstructionError as e:
            raise ConstructionError(f"commutator not expressible in the log lattice of {G.name}: {e}") from e
        for col, (i, j) in enumerate(brackets):
            for k in range(d):
                constants.append(((i, j, k), int(X[k, col])))
    L = LieLattice(d, tuple(constants), modulus, basis.valuations, p, f"lazard_lie({G.name})", tuple(deltas))
    _check_bracket_valuations(L)
    log.info("[lazard_lie] %s: rank %d, %d nonzero brackets mod %d", G.name, d, len(L.constants), modulus)
    return L


def _check_bracket_valuations(L: LieLattice) -> None:
    """v(c_ij^k) + w(e_k) must reach w(z^(e_i+e_j)) = w(e_i) + w(e_j)."""
    if not L.valuations or L.modulus is None:
        return
    _, k_exp = prime_power(L.modulus)
    for (i, j, k), c in L.constants:
        alpha = [0] * L.rank
        alpha[i] += 1
        alpha[j] += 1
        need = groupring_valuation(alpha, L.valuations)
        have = vp_local(c, L.p, k_exp) + L.valuations[k]
        if have < need:
            raise ConstructionError(
                f"bracket [δ_{i}, δ_{j}] has coefficient {c} on δ_{k}: valuation {have} < {need}")


def graded_ranks_agree(G: MatrixCongruenceGroup, L: LieLattice) -> bool:
    """ω(δ_i) = ω(x_i) for every log-basis vector, so gr L and gr G match degree by degree."""
    if not L.log_basis:
        raise ValueError("lattice carries no log basis")
    return all(G.omega(X) == v for X, v in zip(L.log_basis, L.valuations))


def exp_log_roundtrip(G: MatrixCongruenceGroup, L: LieLattice) -> bool:
    basis = find_ordered_basis(G)
    return all(matrix_exp(X) == G.matrix(x) for X, x in zip(L.log_basis, basis.elements))


@dataclass(frozen=True)
class LatticeIdentity:
    holds: bool
    level: int
    witness: Optional[int] = None
    detail: str = ""

    def to_dict(self) -> dict:
        return {"holds": self.holds, "level": self.level, "witness": self.witness, "detail": self.detail}


def check_lattice_identity(G: MatrixCongruenceGroup, L: Optional[LieLattice] = None) -> LatticeIdentity:
    """Compare the log lattice with p^r·Lie(G) for G = 1 + p^r·Λ over Z_p."""
    if G.e != 1:
        raise ValueError("lattice identity is stated for e = 1")
    L = L or lazard_lie(G)
    level = G.spec.level
    scale = G.p ** level
    rows = []
    for i, X in enumerate(L.log_basis):
        coords = _log_coordinates(G, X)
        bad = [a for a, k in zip(coords, G.caps) if a % min(scale, G.p ** k)]
        if bad:
            return LatticeIdentity(False, level, i, f"δ_{i} has a coordinate not divisible by {scale}")
        rows.append([a // scale for a in coords])
    r = rank_mod_p(rows, G.p)
    if r < G.rank:
        return LatticeIdentity(False, level, None, f"δ/p^{level} spans rank {r} < {G.rank} mod p")
    return LatticeIdentity(True, level, None, f"log lattice = {scale}·Lie")


# --------------- modules ---------------
@dataclass(frozen=True, eq=False)
class LieModule:
    """Z/q-module of rank m with one m×m action matrix per lattice basis vector."""
    rank: int
    modulus: int
    actions: tuple[np.ndarray, ...]
    label: str = ""

    def __post_init__(self):
        acts = tuple(np.asarray(A, dtype=np.int64) % self.modulus for A in self.actions)
        for A in acts:
            if A.shape != (self.rank, self.rank):
                raise ValueError(f"action matrix of shape {A.shape}, expected {(self.rank, self.rank)}")
        object.__setattr__(self, "actions", acts)

    @classmethod
    def trivial(cls, lie_rank: int, modulus: int, rank: int = 1) -> "LieModule":
        zero = np.zeros((rank, rank), dtype=np.int64)
        return cls(rank, modulus, tuple(zero for _ in range(lie_rank)), f"trivial Z/{modulus}^{rank}")

    def is_trivial(self) -> bool:
        return not any(A.any() for A in self.actions)

    def check_bracket(self, L: LieLattice) -> None:
        """[A_i, A_j] = Σ_k c_ij^k A_k modulo q."""
        if len(self.actions) != L.rank:
            raise ValueError(f"{len(self.actions)} action matrices for a lattice of rank {L.rank}")
        q = self.modulus
        Lq = L.reduce(q) if L.modulus is not None else L
        c = Lq.structure()
        A = [a.astype(object) for a in self.actions]
        for i in range(L.rank):
            for j in range(i + 1, L.rank):
                lhs = (A[i] @ A[j] - A[j] @ A[i]) % q
                rhs = sum((int(c[i, j, k]) * A[k] for k in range(L.rank)),
                          np.zeros((self.rank, self.rank), dtype=object)) % q
                if (lhs != rhs).any():
                    raise ConstructionError(f"module {self.label}: [A_{i}, A_{j}] differs from the bracket action")


GroupAction = Union[Sequence, Callable]


def _as_int_matrix(A, q: int) -> np.ndarray:
    return np.array(A, dtype=object) % q


def _matrix_valuation(A: np.ndarray, p: int, k: int) -> int:
    return min((vp_local(int(x), p, k) for x in A.ravel()), default=k)


def induced_module(G: MatrixCongruenceGroup, rho: GroupAction, L: LieLattice, k: int,
                   samples: int = 12, seed: Optional[int] = None, basis: Optional[OrderedBasis] = None) -> LieModule:
    """
    Lie action A_i = log ρ(x_i) on M = (Z/p^k)^m.
    rho is either one matrix per ordered-basis element or a map g -> matrix.
    """
    basis = basis or find_ordered_basis(G)
    p = G.p
    q = p ** k
    if callable(rho):
        images = [_as_int_matrix(rho(x), q) for x in basis.elements]
    else:
        images = [_as_int_matrix(R, q) for R in rho]
    if len(images) != basis.rank:
        raise ValueError(f"{len(images)} generator images for an ordered basis of rank {basis.rank}")
    m = images[0].shape[0]
    ident = np.eye(m, dtype=object)
    for i, R in enumerate(images):
        if ((R - ident) % p).any():
            raise HypothesisFailure("module image", f"ρ(x_{i}) is not in 1 + p·End(M)")
    ring = RingSpec(p=p, precision_N=k)
    actions = []
    for R in images:
        A = matrix_log(PAdicMatrix.from_rows(ring, [[int(v) for v in row] for row in R]))
        actions.append(np.array(A.to_int_rows(), dtype=np.int64))
    M = LieModule(m, q, tuple(actions), f"induced on (Z/{q})^{m}")
    if callable(rho):
        _check_group_action(G, rho, q, samples, seed)
    M.check_bracket(L)
    return M


def _check_group_action(G: FilteredGroup, rho: Callable, q: int, samples: int, seed: Optional[int]) -> None:
    """Homomorphism on sampled pairs, and (ρ(g) - 1) gaining at least ω(g)."""
    p, k = prime_power(q)
    rng = random.Random(config.DEFAULT_SEED if seed is None else seed)
    for _ in range(samples):
        x = G.random_element(rng)
        y = G.random_element(rng)
        lhs = _as_int_matrix(rho(G.multiply(x, y)), q)
        rhs = (_as_int_matrix(rho(x), q) @ _as_int_matrix(rho(y), q)) % q
        if (lhs != rhs).any():
            raise HypothesisFailure("module homomorphism", f"ρ(xy) != ρ(x)ρ(y) at {G.describe(x)}")
        R = _as_int_matrix(rho(x), q)
        gain = _matrix_valuation((R - np.eye(R.shape[0], dtype=object)) % q, p, k)
        need = min(k, math.ceil(G.omega(x)))
        if gain < need:
            raise HypothesisFailure("module valuation", f"(ρ(g)-1) gains {gain} < ω(g) at {G.describe(x)}")


class AdjointAction:
    """g ↦ matrix of δ ↦ g·δ·g⁻¹ in the log basis of L, modulo p^k."""

    def __init__(self, G: MatrixCongruenceGroup, L: LieLattice, k: int):
        if not L.log_basis:
            raise ValueError("adjoint action needs a lattice built by lazard_lie")
        self.G = G
        self.L = L
        self.modulus = G.p ** k
        q = _coordinate_modulus(G)
        D = np.array([_log_coordinates(G, X) for X in L.log_basis], dtype=object).T % q
        self.solver = LinearSolver(D, q)
        if self.solver.exact < k:
            raise InsufficientPrecision(f"adjoint action mod p^{k} needs more digits", G.ring.N + k - self.solver.exact)

    def __call__(self, x) -> np.ndarray:
        G = self.G
        g = G.matrix(x)
        g_inv = G.matrix(G.invert(x))
        cols = [_log_coordinates(G, g @ X @ g_inv) for X in self.L.log_basis]
        X = self.solver.solve(np.array(cols, dtype=object).T)
        return X % self.modulus


class DeterminantAction:
    """g ↦ det(g) on a rank-1 module, modulo p^k (e = 1 groups)."""

    def __init__(self, G: MatrixCongruenceGroup, k: int, power: int = 1):
        if G.e != 1:
            raise ValueError("determinant character is defined here for e = 1")
        self.G = G
        self.power = power
        self.modulus = G.p ** k

    def __call__(self, x) -> np.ndarray:
        det = int(sympy.Matrix(self.G.matrix(x).to_int_rows()).det())
        return np.array([[pow(det, self.power, self.modulus)]], dtype=object)


def adjoint_module(G: MatrixCongruenceGroup, L: LieLattice, k: int) -> LieModule:
    return induced_module(G, AdjointAction(G, L, k), L, k)
