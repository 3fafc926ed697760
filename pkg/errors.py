# errors.py
# ------------------------------------------------------------
# Exception hierarchy shared by every lazardlab module.
# ------------------------------------------------------------
from __future__ import annotations

from typing import Optional


class LazardLabError(Exception):
    """Root of all lazardlab failures."""


class InsufficientPrecision(LazardLabError):
    """A decision needs more π-digits than the current model carries."""

    def __init__(self, message: str, required: Optional[int] = None):
        if required is not None:
            message = f"{message} (required precision N >= {required})"
        super().__init__(message)
        self.required = required


class ConvergenceError(LazardLabError, ValueError):
    """Input lies outside the convergence domain of a series."""


class BudgetExceeded(LazardLabError):
    """A configured cap (oracle size, quotient order, bar cells, ...) was hit."""

    def __init__(self, what: str, cap: int, required: Optional[int] = None):
        message = f"{what} exceeds cap {cap}"
        if required is not None:
            message += f" (needs {required})"
        super().__init__(message)
        self.what = what
        self.cap = cap
        self.required = required


class ConstructionError(LazardLabError, RuntimeError):
    """Internal inconsistency: d² != 0, Jacobi failure, gr not free, ..."""


class HypothesisFailure(LazardLabError):
    """A comparison hypothesis (saturation, equi-p-valuation, module image) failed."""

    def __init__(self, hypothesis: str, detail: str = ""):
        super().__init__(f"hypothesis '{hypothesis}' failed" + (f": {detail}" if detail else ""))
        self.hypothesis = hypothesis
        self.detail = detail
