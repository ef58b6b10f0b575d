"""LMMSE estimation for ``y = H x + n`` and its special cases, digital and analog.

Six estimators are supported (:class:`Kind`). The general ones take the
covariances of ``x`` and ``n``; RLS, OLS and OMF assume scalar covariances
and are parametrized by ``lam = var(n) / var(x)``. Each has two closed
forms (``form=1`` inverts an ``X x X`` matrix, ``form=2`` a ``Y x Y`` one).

:func:`build_p` returns the ``P`` matrix that makes a network with
``N = Y`` driven ports and ``M = X`` undriven ports output the estimate on
its undriven ports when driven with ``u = y``.
"""

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .network import PartitionedP, components_from_p, simulate_nodal
from .numerics import ShapeError, as_matrix, inverse, solve_linear

__all__ = [
    "Kind",
    "Sign",
    "ObservationModel",
    "estimate_digital",
    "build_p",
    "estimate_analog",
    "config_op_count",
]


class Kind(str, Enum):
    LMMSE = "LMMSE"
    GLS = "GLS"
    GMF = "GMF"
    RLS = "RLS"
    OLS = "OLS"
    OMF = "OMF"

    @property
    def scalar_covariance(self):
        return self in (Kind.RLS, Kind.OLS, Kind.OMF)


class Sign(str, Enum):
    """Branch of the ``+/-`` pair in the P-matrix table rows."""

    UPPER = "upper"
    LOWER = "lower"

    @property
    def value_sign(self):
        return 1.0 if self is Sign.UPPER else -1.0


def _hermitian_pd(c, name, size):
    c = as_matrix(c, name)
    if c.shape != (size, size):
        raise ShapeError(f"{name} must be {size}x{size}, got {c.shape}")
    if not np.allclose(c, c.conj().T, rtol=0, atol=1e-12 * max(1.0, np.abs(c).max())):
        raise ValueError(f"{name} is not Hermitian")
    try:
        np.linalg.cholesky(c)
    except np.linalg.LinAlgError:
        raise ValueError(f"{name} is not positive definite") from None
    return c


@dataclass(frozen=True)
class ObservationModel:
    """Linear observation ``y = H x + n``.

    `c_x` and `c_n` are required by LMMSE, GLS and GMF; `lam` by RLS and
    OMF. OLS needs only `h`.
    """

    h: np.ndarray
    c_x: np.ndarray = None
    c_n: np.ndarray = None
    lam: float = None

    def __post_init__(self):
        h = as_matrix(self.h, "H")
        object.__setattr__(self, "h", h)
        if self.c_x is not None:
            object.__setattr__(self, "c_x", _hermitian_pd(self.c_x, "C_x", self.dim_x))
        if self.c_n is not None:
            object.__setattr__(self, "c_n", _hermitian_pd(self.c_n, "C_n", self.dim_y))
        if self.lam is not None and not (np.isfinite(self.lam) and self.lam > 0):
            raise ValueError(f"lam must be positive, got {self.lam}")

    @property
    def dim_x(self):
        return self.h.shape[1]

    @property
    def dim_y(self):
        return self.h.shape[0]

    def require(self, kind):
        kind = Kind(kind)
        # GLS form 1 uses only C_n and form 2 only C_x; checked per form
        if kind in (Kind.LMMSE, Kind.GMF):
            missing = [n for n in ("c_x", "c_n") if getattr(self, n) is None]
            if missing:
                raise ValueError(f"{kind.value} needs {', '.join(missing)}")
        if kind in (Kind.RLS, Kind.OMF) and self.lam is None:
            raise ValueError(f"{kind.value} needs lam")
        return kind


def _need(model, attr, what):
    value = getattr(model, attr)
    if value is None:
        raise ValueError(f"{what} needs {attr}")
    return value


def estimate_digital(model, kind, y, form=1):
    """Closed-form estimate of ``x`` from ``y``.

    `y` may hold several observations as columns.
    """
    kind = model.require(kind)
    if form not in (1, 2):
        raise ValueError(f"form must be 1 or 2, got {form}")
    h = model.h
    y = as_matrix(y, "y")
    if y.shape[0] != model.dim_y:
        raise ShapeError(f"y has {y.shape[0]} rows, H has {model.dim_y}")
    hh = h.conj().T
    nx, ny = model.dim_x, model.dim_y

    if kind is Kind.LMMSE:
        cx, cn = model.c_x, model.c_n
        if form == 1:
            cn_h = solve_linear(cn, np.hstack([h, y]), label="C_n")
            a = hh @ cn_h[:, :nx] + inverse(cx, label="C_x")
            return solve_linear(a, hh @ cn_h[:, nx:], label="H^H C_n^-1 H + C_x^-1")
        a = h @ cx @ hh + cn
        return cx @ hh @ solve_linear(a, y, label="H C_x H^H + C_n")

    if kind is Kind.GLS:
        if form == 1:
            cn = _need(model, "c_n", "GLS form 1")
            cn_h = solve_linear(cn, np.hstack([h, y]), label="C_n")
            return solve_linear(hh @ cn_h[:, :nx], hh @ cn_h[:, nx:], label="H^H C_n^-1 H")
        cx = _need(model, "c_x", "GLS form 2")
        return cx @ hh @ solve_linear(h @ cx @ hh, y, label="H C_x H^H")

    if kind is Kind.GMF:
        return model.c_x @ hh @ solve_linear(model.c_n, y, label="C_n")

    lam = model.lam
    if kind is Kind.RLS:
        if form == 1:
            return solve_linear(hh @ h + lam * np.eye(nx), hh @ y, label="H^H H + lam I")
        return hh @ solve_linear(h @ hh + lam * np.eye(ny), y, label="H H^H + lam I")

    if kind is Kind.OLS:
        if form == 1:
            return solve_linear(hh @ h, hh @ y, label="H^H H")
        return hh @ solve_linear(h @ hh, y, label="H H^H")

    return hh @ y / lam


def build_p(model, kind, form=1, sign=Sign.UPPER):
    """``P`` blocks whose network outputs the estimator on ``v2``.

    ``form=1`` gives the rows valid with ``P11`` invertible, ``form=2`` those
    valid with ``P22`` invertible. `sign` picks the ``+/-`` branch; both
    branches compute the same estimate.
    """
    kind = model.require(kind)
    if form not in (1, 2):
        raise ValueError(f"form must be 1 or 2, got {form}")
    s = Sign(sign).value_sign
    h = model.h
    hh = h.conj().T
    nx, ny = model.dim_x, model.dim_y
    eye_x, eye_y = np.eye(nx), np.eye(ny)
    zero_yx = np.zeros((ny, nx))

    if kind is Kind.LMMSE:
        return PartitionedP(s * model.c_n, h, hh, -s * inverse(model.c_x, label="C_x"))
    if kind is Kind.GLS:
        if form == 1:
            return PartitionedP(s * _need(model, "c_n", "GLS form 1"), h, hh, np.zeros((nx, nx)))
        cx = _need(model, "c_x", "GLS form 2")
        return PartitionedP(np.zeros((ny, ny)), h, hh, -s * inverse(cx, label="C_x"))
    if kind is Kind.GMF:
        return PartitionedP(s * model.c_n, zero_yx, hh, -s * inverse(model.c_x, label="C_x"))
    if kind is Kind.OLS:
        if form == 1:
            return PartitionedP(s * eye_y, h, hh, np.zeros((nx, nx)))
        return PartitionedP(np.zeros((ny, ny)), h, hh, -s * eye_x)

    lam = model.lam
    off = h if kind is Kind.RLS else zero_yx
    if form == 1:
        return PartitionedP(s * eye_y, off, hh, -s * lam * eye_x)
    return PartitionedP(s * lam * eye_y, off, hh, -s * eye_x)


def estimate_analog(model, kind, y, form=1, sign=Sign.UPPER, y0=0.02):
    """Estimate read from the undriven ports of a synthesized network."""
    net = components_from_p(build_p(model, kind, form, sign), y0)
    return simulate_nodal(net, y)[1]


def config_op_count(kind, dim_x, dim_y):
    """Real operations needed to set the network components for `kind`."""
    kind = Kind(kind)
    if dim_x < 1 or dim_y < 1:
        raise ValueError("dimensions must be positive")
    factor = 4 if kind in (Kind.GMF, Kind.OMF) else 6
    return factor * dim_x * dim_y
