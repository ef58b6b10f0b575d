"""Real-operation counts per coherence block, digital versus analog network.

All counts are exact :class:`fractions.Fraction` values. Per-block costs add
the one-off design of the beamforming matrix to ``tau`` per-symbol
matrix-vector products; the network has no per-symbol cost.
"""

import csv
import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction

from .estimators import Kind

__all__ = [
    "Task",
    "Realization",
    "ComplexityModel",
    "ops_per_block",
    "gain",
    "dft_saving",
    "estimator_counts",
    "rzfbf_design_ops",
    "sci",
    "COMPLEXITY_COLUMNS",
    "complexity_rows",
    "write_complexity_csv",
]


class Task(str, Enum):
    ZERO_FORCING = "zero-forcing"
    MATCHED_FILTERING = "matched-filtering"
    DFT = "dft"
    GENERIC_LMMSE = "generic-lmmse"
    PER_SYMBOL_PRODUCT = "per-symbol-product"


class Realization(str, Enum):
    DIGITAL = "digital"
    MILAC = "milac"


@dataclass(frozen=True)
class ComplexityModel:
    """Dimensions for one count; ``n_t`` defaults to ``n_r``.

    ``GENERIC_LMMSE`` reads ``X = n_t`` and ``Y = n_r``;
    ``PER_SYMBOL_PRODUCT`` reads ``n_rf`` and ``n_s``.
    """

    task: Task
    realization: Realization
    n_r: int = None
    n_t: int = None
    n_rf: int = None
    n_s: int = None
    tau: int = 1

    def __post_init__(self):
        object.__setattr__(self, "task", Task(self.task))
        object.__setattr__(self, "realization", Realization(self.realization))
        if self.tau < 1:
            raise ValueError(f"tau must be >= 1, got {self.tau}")


def _need(model, *names):
    values = []
    for name in names:
        v = getattr(model, name)
        if name == "n_t" and v is None:
            v = model.n_r
        if v is None:
            raise ValueError(f"{model.task.value} needs {name}")
        if v < 1:
            raise ValueError(f"{name} must be >= 1, got {v}")
        values.append(v)
    return values


def _log2(n):
    # exact for powers of two
    if n & (n - 1) == 0:
        return Fraction(n.bit_length() - 1)
    return Fraction(math.log2(n))


def ops_per_block(model):
    """Real operations per coherence block of ``model.tau`` symbols.

    Zero-forcing covers R-ZFBF/ZFBF at the transmitter (``n_r <= n_t``) and
    MMSE/ZF at the receiver (``n_r >= n_t``); the digital design cost is
    ``8 (n_t n_r^2 + n_r^3 / 3)`` or its mirror, and each symbol adds an
    ``8 n_t n_r`` matrix-vector product.
    """
    m = model
    tau = Fraction(m.tau)
    digital = m.realization is Realization.DIGITAL

    if m.task is Task.ZERO_FORCING:
        n_r, n_t = _need(m, "n_r", "n_t")
        if not digital:
            return Fraction(6 * n_t * n_r)
        small, large = min(n_r, n_t), max(n_r, n_t)
        design = 8 * (large * small**2 + Fraction(small**3, 3))
        return design + 8 * n_t * n_r * tau

    if m.task is Task.MATCHED_FILTERING:
        n_r, n_t = _need(m, "n_r", "n_t")
        if not digital:
            return Fraction(4 * n_t * n_r)
        return 8 * n_t * n_r * tau

    if m.task is Task.DFT:
        (n_r,) = _need(m, "n_r")
        if not digital:
            return Fraction(0)
        # rounded to the nearest integer after exact evaluation
        return Fraction(round(Fraction(34, 9) * n_r * _log2(n_r) * tau))

    if m.task is Task.GENERIC_LMMSE:
        n_r, n_t = _need(m, "n_r", "n_t")
        milac, dig = estimator_counts(Kind.LMMSE, n_t, n_r)
        return dig if digital else milac

    n_rf, n_s = _need(m, "n_rf", "n_s")
    return 8 * n_rf * n_s * tau if digital else Fraction(0)


def gain(task, n_r, tau, n_t=None):
    """Digital over network operation count. Undefined for the DFT (see :func:`dft_saving`)."""
    task = Task(task)
    if task is Task.DFT:
        raise ValueError("the network DFT costs nothing; use dft_saving")
    dig = ops_per_block(ComplexityModel(task, Realization.DIGITAL, n_r=n_r, n_t=n_t, tau=tau))
    ana = ops_per_block(ComplexityModel(task, Realization.MILAC, n_r=n_r, n_t=n_t, tau=tau))
    return dig / ana


def dft_saving(n_r, tau):
    return ops_per_block(ComplexityModel(Task.DFT, Realization.DIGITAL, n_r=n_r, tau=tau))


def estimator_counts(kind, dim_x, dim_y):
    """``(network, digital)`` operation counts for one estimator evaluation."""
    kind = Kind(kind)
    x, y = dim_x, dim_y
    if x < 1 or y < 1:
        raise ValueError("dimensions must be positive")
    if kind in (Kind.GMF, Kind.OMF):
        milac = Fraction(4 * x * y)
    else:
        milac = Fraction(6 * x * y)
    if kind in (Kind.LMMSE, Kind.GLS):
        digital = 8 * (x * y**2 + x**2 * y + Fraction(min(x**3, y**3), 3))
    elif kind in (Kind.RLS, Kind.OLS):
        digital = 8 * min(x**2 * y + Fraction(x**3, 3), x * y**2 + Fraction(y**3, 3))
    elif kind is Kind.GMF:
        digital = Fraction(8 * (x**2 + x * y + y**2))
    else:
        digital = Fraction(8 * x * y)
    return milac, digital


def rzfbf_design_ops(n_t, n_r, realization):
    """Operations to produce an R-ZFBF precoder once, without per-symbol products."""
    if Realization(realization) is Realization.MILAC:
        return Fraction(6 * n_t * n_r)
    return 8 * (n_t * n_r**2 + Fraction(n_r**3, 3))


def sci(value, digits=2):
    """Scientific notation with `digits` significant figures."""
    return f"{float(value):.{digits - 1}e}"


COMPLEXITY_COLUMNS = ("task", "realization", "n_t", "n_r", "tau", "ops_exact", "ops_sci", "gain")


def complexity_rows(n_values, tau, tasks=(Task.ZERO_FORCING, Task.MATCHED_FILTERING, Task.DFT)):
    """Rows for ``N_T = N_R = n`` over `n_values`.

    ``gain`` is digital over network count on both rows of a pair; for the
    DFT it is the absolute saving.
    """
    rows = []
    for task in map(Task, tasks):
        for n in n_values:
            counts = {
                r: ops_per_block(ComplexityModel(task, r, n_r=n, n_t=n, tau=tau))
                for r in Realization
            }
            if task is Task.DFT:
                g = counts[Realization.DIGITAL] - counts[Realization.MILAC]
            else:
                g = counts[Realization.DIGITAL] / counts[Realization.MILAC]
            for r in Realization:
                rows.append((task.value, r.value, n, n, tau, counts[r], sci(counts[r], 4), g))
    return rows


def _exact(v):
    return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"


def write_complexity_csv(rows, path):
    with open(path, "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(COMPLEXITY_COLUMNS)
        for task, real, n_t, n_r, tau, ops, ops_s, g in rows:
            w.writerow([task, real, n_t, n_r, tau, _exact(ops), ops_s, repr(float(g))])
