"""Agreement measures between model and simulation curves."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np
from scipy import special


class UndefinedCorrelation(ValueError):
    """Raised when a series is constant and Pearson's r has no value."""


@dataclass(frozen=True)
class CorrelationResult:
    r: float
    p_value: float
    n: int

    def to_dict(self) -> dict:
        return asdict(self)


def _as_pair(x, y) -> tuple[np.ndarray, np.ndarray]:
    x = np.asarray(x, dtype=float).ravel()
    y = np.asarray(y, dtype=float).ravel()
    if len(x) != len(y):
        raise ValueError(f"length mismatch: {len(x)} vs {len(y)}")
    return x, y


def pearson(x, y) -> CorrelationResult:
    """Pearson's r with a two-sided p-value from the t distribution (n-2 dof).

    The p-value is ``I_{df/(df+t^2)}(df/2, 1/2)``, the regularised
    incomplete beta form of the two-tailed Student t probability.
    """
    x, y = _as_pair(x, y)
    n = len(x)
    if n < 2:
        raise ValueError("need at least two points")
    dx = x - x.mean()
    dy = y - y.mean()
    sxx = float(np.dot(dx, dx))
    syy = float(np.dot(dy, dy))
    if sxx == 0.0 or syy == 0.0:
        raise UndefinedCorrelation("correlation undefined for a constant series")
    r = float(np.dot(dx, dy)) / math.sqrt(sxx * syy)
    r = max(-1.0, min(1.0, r))
    df = n - 2
    if df == 0:
        p = 1.0
    elif abs(r) == 1.0:
        p = 0.0
    else:
        t2 = r * r * df / (1.0 - r * r)
        p = float(special.betainc(0.5 * df, 0.5, df / (df + t2)))
    return CorrelationResult(r, min(max(p, 0.0), 1.0), n)


@dataclass(frozen=True)
class Discrepancy:
    max_abs_pct: float
    mean_abs_pct: float
    argmax_t: int

    def to_dict(self) -> dict:
        return asdict(self)


def series_discrepancy(x, y) -> Discrepancy:
    """Absolute differences ``|x - y|`` as a percentage of ``max(y)``.

    ``y`` is the reference (usually the simulation average).
    """
    x, y = _as_pair(x, y)
    if len(x) == 0:
        raise ValueError("empty series")
    base = float(np.max(np.abs(y)))
    if base == 0.0:
        raise ValueError("reference series is all zero")
    pct = 100.0 * np.abs(x - y) / base
    k = int(np.argmax(pct))
    return Discrepancy(float(pct[k]), float(pct.mean()), k)


def compare(x, y) -> dict:
    """Correlation and discrepancy summary as a JSON-ready dict.

    Undefined pieces (constant series, all-zero reference) come back as
    ``None`` with an ``error`` note rather than raising.
    """
    out: dict = {"r": None, "p_value": None, "n": len(np.ravel(x))}
    notes = []
    try:
        out.update(pearson(x, y).to_dict())
    except UndefinedCorrelation as exc:
        notes.append(str(exc))
    try:
        out.update(series_discrepancy(x, y).to_dict())
    except ValueError as exc:
        out.update({"max_abs_pct": None, "mean_abs_pct": None, "argmax_t": None})
        notes.append(str(exc))
    if notes:
        out["error"] = "; ".join(notes)
    return out
