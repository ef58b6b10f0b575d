"""Precoders, combiners and the networks that realize them.

Channel convention: ``h`` is ``N_R x N_T`` and ``y = h @ x + n``.
A transmitter precodes ``N_S = N_R`` user symbols with ``W`` (``N_T x N_R``);
a receiver combines with ``G`` (``N_T x N_R``) to detect ``N_S = N_T``
streams.
"""

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .estimators import Kind, ObservationModel, Sign, build_p
from .network import MilacNetwork, PartitionedP, components_from_p
from .numerics import ShapeError, as_matrix, solve_linear

__all__ = [
    "Strategy",
    "Side",
    "Normalization",
    "BeamformerSpec",
    "optimal_lambda",
    "arbitrary_tx_network",
    "arbitrary_rx_network",
    "precoder_digital",
    "combiner_digital",
    "normalize_precoder",
    "lmmse_inspired_network",
    "dft_matrix",
    "dft_network",
]


class Strategy(str, Enum):
    ARBITRARY = "arbitrary"
    RZFBF = "R-ZFBF"
    ZFBF = "ZFBF"
    MBF = "MBF"
    MMSE = "MMSE"
    ZF = "ZF"
    MF = "MF"
    DFT = "DFT"


class Side(str, Enum):
    TRANSMITTER = "tx"
    RECEIVER = "rx"


class Normalization(str, Enum):
    PER_COLUMN = "per-column"
    FROBENIUS = "frobenius"
    NONE = "none"


_TX = {Strategy.ARBITRARY, Strategy.RZFBF, Strategy.ZFBF, Strategy.MBF}
_RX = {Strategy.ARBITRARY, Strategy.MMSE, Strategy.ZF, Strategy.MF, Strategy.DFT}

# estimator computed by the network for each LMMSE-inspired strategy
_KIND = {
    Strategy.RZFBF: Kind.RLS,
    Strategy.ZFBF: Kind.OLS,
    Strategy.MBF: Kind.OMF,
    Strategy.MMSE: Kind.RLS,
    Strategy.ZF: Kind.OLS,
    Strategy.MF: Kind.OMF,
}


@dataclass(frozen=True)
class BeamformerSpec:
    strategy: Strategy
    side: Side
    lam: float = 1.0
    normalization: Normalization = Normalization.NONE
    matrix: np.ndarray = None

    def __post_init__(self):
        strategy, side = Strategy(self.strategy), Side(self.side)
        object.__setattr__(self, "strategy", strategy)
        object.__setattr__(self, "side", side)
        object.__setattr__(self, "normalization", Normalization(self.normalization))
        allowed = _TX if side is Side.TRANSMITTER else _RX
        if strategy not in allowed:
            raise ValueError(f"{strategy.value} is not a {side.name.lower()} strategy")
        if strategy is Strategy.ARBITRARY and self.matrix is None:
            raise ValueError("arbitrary beamforming needs an explicit matrix")
        if not (np.isfinite(self.lam) and self.lam > 0):
            raise ValueError(f"lam must be positive, got {self.lam}")


def optimal_lambda(n, p_t, sigma2):
    """Regularizer ``n * sigma2 / p_t``; `n` is N_R at the TX and N_T at the RX."""
    return n * sigma2 / p_t


def _matrix_network(a, y0):
    """Network with ``P = [[I, 0], [-a, I]]``, written out component by component."""
    a = as_matrix(a, "matrix")
    m, n = a.shape
    comps = np.zeros((n + m, n + m), dtype=np.complex128)
    comps[n:, :n] = y0 * a
    comps[np.arange(n), np.arange(n)] = -y0 * a.sum(axis=0)
    return MilacNetwork(n, m, y0, comps)


def arbitrary_tx_network(w, y0):
    """Network whose output ports carry ``x = w @ s`` for symbols ``s`` on its inputs."""
    return _matrix_network(w, y0)


def arbitrary_rx_network(g, y0):
    """Network whose output ports carry ``z = g @ y`` for received ``y`` on its inputs."""
    return _matrix_network(g, y0)


def normalize_precoder(f, normalization):
    f = as_matrix(f, "F")
    normalization = Normalization(normalization)
    if normalization is Normalization.PER_COLUMN:
        return f / np.linalg.norm(f, axis=0, keepdims=True)
    if normalization is Normalization.FROBENIUS:
        return np.sqrt(f.shape[1]) * f / np.linalg.norm(f)
    return f


def precoder_digital(strategy, h, lam=1.0, normalization=Normalization.PER_COLUMN):
    """Transmit precoder ``W`` (``N_T x N_R``) for a multi-user channel.

    R-ZFBF uses ``H^H (H H^H + lam I)^-1``, ZFBF ``H^H (H H^H)^-1`` and MBF
    ``H^H``. With ``PER_COLUMN`` every user gets a unit-norm beam; with
    ``FROBENIUS`` the matrix is scaled to ``||W||_F^2 = N_R``.
    """
    strategy = Strategy(strategy)
    h = as_matrix(h, "H")
    n_r, n_t = h.shape
    if n_r > n_t:
        raise ShapeError(f"precoding needs N_R <= N_T, got {n_r} x {n_t}")
    hh = h.conj().T
    if strategy is Strategy.RZFBF:
        f = hh @ solve_linear(h @ hh + lam * np.eye(n_r), np.eye(n_r), label="H H^H + lam I")
    elif strategy is Strategy.ZFBF:
        f = hh @ solve_linear(h @ hh, np.eye(n_r), label="H H^H")
    elif strategy is Strategy.MBF:
        f = hh
    else:
        raise ValueError(f"{strategy.value} is not a precoder")
    return normalize_precoder(f, normalization)


def combiner_digital(strategy, h, lam=1.0):
    """Receive combiner ``G`` (``N_T x N_R``) for a single-user channel."""
    strategy = Strategy(strategy)
    h = as_matrix(h, "H")
    n_r, n_t = h.shape
    if n_r < n_t:
        raise ShapeError(f"combining needs N_R >= N_T, got {n_r} x {n_t}")
    hh = h.conj().T
    if strategy is Strategy.MMSE:
        return solve_linear(hh @ h + lam * np.eye(n_t), hh, label="H^H H + lam I")
    if strategy is Strategy.ZF:
        return solve_linear(hh @ h, hh, label="H^H H")
    if strategy is Strategy.MF:
        return hh / lam
    raise ValueError(f"{strategy.value} is not a combiner")


def _frobenius_scale(p, h):
    """Factor that brings the precoder computed by `p` to ``||W||_F^2 = N_R``."""
    # the network computes F; its norm is evaluated digitally from the same P
    f = -solve_linear(p.p22, p.p21, label="P22")
    f = f @ solve_linear(p.p12 @ f + p.p11, np.eye(p.n), label="P11 + P12 F")
    return np.sqrt(h.shape[0]) / np.linalg.norm(f)


def lmmse_inspired_network(spec, h, y0, sign=Sign.UPPER):
    """Network computing an LMMSE-inspired precoder or combiner in the analog domain.

    Transmit strategies use the ``P22``-invertible rows (``u = s``, ``N_R``
    driven ports, ``N_T`` outputs); receive strategies use the
    ``P11``-invertible rows (``u = y``, ``N_R`` driven ports, ``N_T``
    outputs). A ``FROBENIUS`` normalization on the transmit side multiplies
    the lower-left block of ``P`` by ``c`` and divides the upper-right one by
    ``c``, which scales the output by ``c`` without touching the rest.
    """
    if spec.strategy not in _KIND:
        raise ValueError(f"{spec.strategy.value} is not LMMSE-inspired")
    h = as_matrix(h, "H")
    kind = _KIND[spec.strategy]
    # matched beamforming is plain H^H; only the receive filter carries 1/lam
    lam = 1.0 if spec.strategy is Strategy.MBF else spec.lam
    model = ObservationModel(h, lam=lam)
    if spec.side is Side.TRANSMITTER:
        if h.shape[0] > h.shape[1]:
            raise ShapeError(f"precoding needs N_R <= N_T, got {h.shape}")
        p = build_p(model, kind, form=2, sign=sign)
        if spec.normalization is Normalization.FROBENIUS:
            c = _frobenius_scale(p, h)
            p = PartitionedP(p.p11, p.p12 / c, p.p21 * c, p.p22)
        elif spec.normalization is Normalization.PER_COLUMN:
            raise ValueError("columns cannot be normalized individually in the analog domain")
    else:
        if h.shape[0] < h.shape[1]:
            raise ShapeError(f"combining needs N_R >= N_T, got {h.shape}")
        if spec.normalization is not Normalization.NONE:
            raise ValueError("receive combiners are not normalized")
        p = build_p(model, kind, form=1, sign=sign)
    return components_from_p(p, y0)


def dft_matrix(n):
    """Unitary DFT matrix ``exp(-2j pi i k / n) / sqrt(n)``."""
    idx = np.arange(n)
    return np.exp(-2j * np.pi * np.outer(idx, idx) / n) / np.sqrt(n)


def dft_network(n_r, y0):
    """Fixed network that outputs the DFT of the signal on its driven ports."""
    if n_r < 1:
        raise ValueError("n_r must be positive")
    comps = np.zeros((2 * n_r, 2 * n_r), dtype=np.complex128)
    comps[n_r:, :n_r] = y0 * dft_matrix(n_r)
    # DFT columns other than the first sum to zero
    comps[0, 0] = -y0 * np.sqrt(n_r)
    return MilacNetwork(n_r, n_r, y0, comps)
