"""Numeric rendering shared by reports, list naming, and the CLI.

All tables display numbers with at most 3 decimals, trailing zeros stripped
(40.629, 13.83, 1). Undefined metric values render as "NaN"; cells absent
from an outer join render as "--" (handled by the writers, not here).
"""

from __future__ import annotations

import math

__all__ = ["fmt3", "fmt_metric"]


def fmt3(value) -> str:
    """Format a finite number with 3 decimals, trailing zeros stripped."""
    f = float(value)
    if math.isnan(f) or math.isinf(f):
        raise ValueError(f"fmt3 requires a finite number, got {value!r}")
    s = f"{f:.3f}".rstrip("0").rstrip(".")
    return "0" if s in ("", "-0") else s


def fmt_metric(value) -> str:
    """Format a metric value; None renders as NaN, infinities as inf."""
    if value is None:
        return "NaN"
    f = float(value)
    if math.isinf(f):
        return "inf" if f > 0 else "-inf"
    return fmt3(value)
