"""
LSCM Toolkit - Errors

Exception types raised by the toolkit. Each one also derives from the closest
built-in exception so callers can catch ``ValueError`` or ``RuntimeError``.
"""

from typing import Iterable, List, Tuple


class LscmError(Exception):
    """Base class for all toolkit errors."""


class ConfigurationError(LscmError, ValueError):
    """Scenario configuration failed validation."""


class DimensionError(LscmError, ValueError):
    """Array, grid, gain pattern, codebook or measurement shapes disagree."""


class CoverageError(LscmError, ValueError):
    """Rotated angles fall outside the element pattern's field of view."""

    def __init__(self, message: str, clipped_cells: Iterable[Tuple[float, float]]):
        self.clipped_cells: List[Tuple[float, float]] = list(clipped_cells)
        preview = ", ".join(f"({t:g}, {a:g})" for t, a in self.clipped_cells[:10])
        more = "" if len(self.clipped_cells) <= 10 else f" and {len(self.clipped_cells) - 10} more"
        super().__init__(f"{message}: {preview}{more}")


class MeasurementFormatError(LscmError, ValueError):
    """A measurement file could not be parsed."""

    def __init__(self, message: str, line_number: int = None):
        self.line_number = line_number
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)


class NNLSConvergenceError(LscmError, RuntimeError):
    """The active-set NNLS solver hit its iteration cap."""

    def __init__(self, message: str, n_rows: int, n_cols: int, max_iter: int):
        self.n_rows = n_rows
        self.n_cols = n_cols
        self.max_iter = max_iter
        super().__init__(
            f"{message} (sub-matrix {n_rows}x{n_cols}, iteration cap {max_iter})"
        )


class SolverDivergenceError(LscmError, RuntimeError):
    """Fixed-step proximal gradient increased the objective."""
