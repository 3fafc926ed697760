# config.py
import logging
import os
import sys

try:
    from dotenv import load_dotenv
    load_dotenv()
except Exception:
    pass


def _env_int(name: str, default: int) -> int:
    raw = os.getenv(name, "").strip()
    if not raw:
        return default
    try:
        return int(raw)
    except ValueError:
        return default


# ---- Precision ----
# Working precision N counts π-digits; headroom lifts for log/exp may go up to the max.
DEFAULT_PRECISION = _env_int("LAZARDLAB_PRECISION", 8)
MAX_PRECISION = _env_int("LAZARDLAB_MAX_PRECISION", 96)

# ---- Sampling ----
DEFAULT_SEED = _env_int("LAZARDLAB_SEED", 1729)
FILTRATION_SAMPLES = _env_int("LAZARDLAB_SAMPLES", 40)

# ---- Budgets ----
QUOTIENT_CAP = _env_int("LAZARDLAB_QUOTIENT_CAP", 3 ** 9)
TABLE_CAP = _env_int("LAZARDLAB_TABLE_CAP", 1_200_000)
BAR_CAP = _env_int("LAZARDLAB_BAR_CAP", 3_000_000)
KERNEL_COLUMN_CAP = _env_int("LAZARDLAB_KERNEL_COLUMN_CAP", 2000)
DENSE_COLUMN_LIMIT = _env_int("LAZARDLAB_DENSE_COLUMN_LIMIT", 512)
ORACLE_CAP = _env_int("LAZARDLAB_ORACLE_CAP", 8)
LEVEL_BUDGET = _env_int("LAZARDLAB_LEVEL_BUDGET", 4)
GR_ENUM_CAP = _env_int("LAZARDLAB_GR_ENUM_CAP", 5 ** 5)

# ---- Runtime ----
WORKERS = max(1, _env_int("LAZARDLAB_WORKERS", 1))
LOG_LEVEL = os.getenv("LAZARDLAB_LOG_LEVEL", "WARNING").strip().upper() or "WARNING"
REPORT_DIR = os.getenv("LAZARDLAB_REPORT_DIR", "reports")

# --- p = 2 flag ---
# Default OFF; enable with LAZARDLAB_ALLOW_P2=true or set_allow_p2_runtime(True).
_ALLOW_P2_DEFAULT = False
_ALLOW_P2_RUNTIME = None  # None means "no override, use env/default"


def allow_p2() -> bool:
    """
    Whether groups over p=2 may be built.
    Priority: runtime override (if set) -> env var -> default.
    """
    if _ALLOW_P2_RUNTIME is not None:
        return bool(_ALLOW_P2_RUNTIME)

    raw = os.getenv("LAZARDLAB_ALLOW_P2", "").strip().lower()
    if raw in ("1", "true", "yes", "on"):
        return True
    if raw in ("0", "false", "no", "off"):
        return False
    return _ALLOW_P2_DEFAULT


def set_allow_p2_runtime(value) -> None:
    """Flip the p=2 flag in-process; pass None to fall back to env/default."""
    global _ALLOW_P2_RUNTIME
    _ALLOW_P2_RUNTIME = None if value is None else bool(value)


def configure_logging(level: str | None = None) -> None:
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter("[%(name)s] %(levelname)s %(message)s"))
    root = logging.getLogger("lazardlab")
    root.handlers[:] = [handler]
    root.setLevel((level or LOG_LEVEL).upper())
    root.propagate = False


# ===== Group fixtures =====
# level counts π-digits: the group is 1 + π^level · (shape lattice).
# eisenstein lists coefficients low -> high, leading 1 included; omitted for e = 1.
GROUP_FIXTURES = {
    "cyclic3": {"p": 3, "e": 1, "n": 1, "level": 1, "shape": "full"},
    "cyclic3-level2": {"p": 3, "e": 1, "n": 1, "level": 2, "shape": "full"},
    "torus3": {"p": 3, "e": 1, "n": 2, "level": 1, "shape": "diagonal"},
    "torus3x3": {"p": 3, "e": 1, "n": 3, "level": 1, "shape": "diagonal"},
    "heisenberg3": {"p": 3, "e": 1, "n": 3, "level": 1, "shape": "unipotent"},
    "gl2-3": {"p": 3, "e": 1, "n": 2, "level": 1, "shape": "full"},
    "ramified5": {"p": 5, "e": 2, "eisenstein": [-5, 0, 1], "n": 1, "level": 1, "shape": "full"},
    "ramified5-weil": {"p": 5, "e": 2, "eisenstein": [-5, 0, 1], "n": 1, "level": 2,
                       "shape": "full", "filtration": "weil"},
    "ramified3": {"p": 3, "e": 2, "eisenstein": [-3, 0, 1], "n": 1, "level": 2, "shape": "full"},
    "quaternion5": {"p": 5, "e": 2, "eisenstein": [-5, 0, 1], "n": 2, "level": 1,
                    "shape": "quaternion", "fixture_tag": "quaternion-units"},
    "z2-level1": {"p": 2, "e": 1, "n": 1, "level": 1, "shape": "full"},
    "z2-level2": {"p": 2, "e": 1, "n": 1, "level": 2, "shape": "full"},
}

# ===== Formal group law fixtures =====
# Each component maps an exponent tuple over (X_1..X_n, Y_1..Y_n) to its coefficient.
FGL_FIXTURES = {
    "additive": {"n": 1, "components": [{(1, 0): 1, (0, 1): 1}]},
    "multiplicative": {"n": 1, "components": [{(1, 0): 1, (0, 1): 1, (1, 1): 1}]},
    "unipotent2": {"n": 2, "components": [
        {(1, 0, 0, 0): 1, (0, 0, 1, 0): 1},
        {(0, 1, 0, 0): 1, (0, 0, 0, 1): 1, (1, 0, 1, 0): 1},
    ]},
}

# ===== Lie lattice fixtures =====
# brackets are (i, j, k, c) with [e_i, e_j] = c·e_k, 0-based, i < j; absent pairs bracket to 0.
# quaternion: e_1 = Π, e_2 = uΠ, e_3 = p, e_4 = p·u in the maximal order, Π² = p, u² = c = 2, uΠ = -Πu.
LATTICE_FIXTURES = {
    "quaternion5": {"p": 5, "rank": 4, "valuations": ["1/2", "1/2", "1", "1"],
                    "brackets": [(0, 1, 3, -2), (0, 3, 1, -10), (1, 3, 0, -20)]},
    "heisenberg3": {"p": 3, "rank": 3, "valuations": ["1", "1", "1"],
                    "brackets": [(0, 2, 1, 3)]},
    "abelian3": {"p": 3, "rank": 3, "valuations": ["1", "1", "1"], "brackets": []},
}

# ===== Experiment defaults =====
EXPERIMENT_DEFAULTS = {
    "morava": {"p": 5, "precision": 8, "max_degree": 4},
    "exterior": {"p": 3, "precision": 8, "max_degree": 2},
    "ramified-bases": {"p": 5, "precision": 8},
    "uniformity": {"p": 3, "precision": 10, "depth": 4},
    "chainmap": {"p": 3, "samples": 50},
    "two-filtrations": {"precision": 8},
    "nonsaturated": {"p": 3, "precision": 10, "max_degree": 1},
    "torsion": {"p": 3, "precision": 8},
    "comparison": {"precision": 8},
    "lattice-identity": {"precision": 5},
}


def get_group_fixture(name: str) -> dict:
    key = (name or "").strip().lower()
    if key not in GROUP_FIXTURES:
        raise ValueError(f"Unknown group fixture '{name}'; known: " + ", ".join(sorted(GROUP_FIXTURES)))
    return dict(GROUP_FIXTURES[key])


def get_lattice_fixture(name: str) -> dict:
    key = (name or "").strip().lower()
    if key not in LATTICE_FIXTURES:
        raise ValueError(f"Unknown lattice fixture '{name}'; known: " + ", ".join(sorted(LATTICE_FIXTURES)))
    return LATTICE_FIXTURES[key]


def get_fgl_fixture(name: str) -> dict:
    key = (name or "").strip().lower()
    if key not in FGL_FIXTURES:
        raise ValueError(f"Unknown formal group fixture '{name}'; known: " + ", ".join(sorted(FGL_FIXTURES)))
    return FGL_FIXTURES[key]
