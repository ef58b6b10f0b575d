"""Lloyd-Max quantization of Gaussian variables and of network components."""

from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr

from .network import replace_couplings

__all__ = [
    "QuantizerCodebook",
    "lloyd_max_codebook",
    "quantize",
    "quantize_network",
]

_SQRT_2PI = np.sqrt(2 * np.pi)


def _pdf(x):
    return np.exp(-0.5 * x * x) / _SQRT_2PI


@dataclass(frozen=True)
class QuantizerCodebook:
    """Scalar quantizer for a unit-variance real Gaussian.

    ``thresholds`` has ``len(levels) - 1`` entries; values in
    ``(thresholds[i-1], thresholds[i]]`` map to ``levels[i]``.
    """

    bits: int
    levels: np.ndarray
    thresholds: np.ndarray

    @property
    def cell_probabilities(self):
        edges = np.concatenate([[-np.inf], self.thresholds, [np.inf]])
        return np.diff(ndtr(edges))

    @property
    def mse(self):
        """Mean squared error on a unit-variance Gaussian."""
        edges = np.concatenate([[-np.inf], self.thresholds, [np.inf]])
        prob = np.diff(ndtr(edges))
        # x * pdf(x) vanishes at +-inf; clip so the product stays finite
        e = np.clip(edges, -40.0, 40.0)
        e_pdf = _pdf(e)
        m1 = e_pdf[:-1] - e_pdf[1:]
        m2 = prob + e[:-1] * e_pdf[:-1] - e[1:] * e_pdf[1:]
        c = self.levels
        return float(np.sum(m2 - 2 * c * m1 + c * c * prob))

    @property
    def sqnr_db(self):
        return -10 * np.log10(self.mse)


def _centroids(thresholds):
    edges = np.concatenate([[-np.inf], thresholds, [np.inf]])
    prob = np.diff(ndtr(edges))
    return (_pdf(edges[:-1]) - _pdf(edges[1:])) / prob


def lloyd_max_codebook(bits, tol=1e-12, max_iter=1_000_000):
    """Optimal ``2**bits``-level quantizer for ``N(0, 1)`` by Lloyd iteration.

    Alternates centroid and midpoint conditions until no level moves by
    more than `tol`.
    """
    if bits < 1:
        raise ValueError("need at least one bit")
    n = 2**bits
    # uniform start on +-3 sigma
    levels = np.linspace(-3, 3, n) if n > 2 else np.array([-1.0, 1.0])
    for _ in range(max_iter):
        thresholds = 0.5 * (levels[1:] + levels[:-1])
        new = _centroids(thresholds)
        step = np.max(np.abs(new - levels))
        levels = new
        if step < tol:
            break
    else:
        raise RuntimeError(f"Lloyd iteration did not converge for {bits} bits")
    # enforce exact symmetry lost to rounding
    levels = 0.5 * (levels - levels[::-1])
    thresholds = 0.5 * (levels[1:] + levels[:-1])
    return QuantizerCodebook(bits, levels, thresholds)


def quantize(x, codebook, scale=1.0):
    """Map real `x` to the nearest level of ``scale * codebook``."""
    x = np.asarray(x, dtype=float)
    idx = np.searchsorted(scale * codebook.thresholds, x, side="left")
    return scale * codebook.levels[idx]


def _quantize_complex(z, codebook, scale):
    return quantize(z.real, codebook, scale) + 1j * quantize(z.imag, codebook, scale)


def quantize_network(net, codebook, scale=None):
    """Discretize the port-to-port components of `net`.

    Real and imaginary parts of every nonzero off-diagonal component are
    quantized with `codebook` scaled to the per-dimension standard deviation
    of the components in the same off-diagonal block (driven/undriven port
    groups). Components that are exactly zero are absent from the circuit
    and stay zero. The port-to-ground components are continuous and are
    re-solved so that the diagonal of ``P`` is unchanged.

    Parameters
    ----------
    codebook : QuantizerCodebook or None
        ``None`` returns the network unchanged.
    scale : float, optional
        Fixed per-dimension standard deviation for all blocks instead of the
        empirical one.
    """
    if codebook is None:
        return net
    comps = net.components
    n = net.n_in
    out = comps.copy()
    off = ~np.eye(net.n_ports, dtype=bool)
    blocks = [(slice(0, n), slice(0, n)), (slice(0, n), slice(n, None)),
              (slice(n, None), slice(0, n)), (slice(n, None), slice(n, None))]
    for rows, cols in blocks:
        sub = comps[rows, cols]
        mask = off[rows, cols] & (sub != 0)
        if not mask.any():
            continue
        vals = sub[mask]
        std = scale if scale is not None else np.sqrt(np.mean(np.abs(vals) ** 2) / 2)
        q = sub.copy()
        q[mask] = _quantize_complex(vals, codebook, std)
        out[rows, cols] = q
    return replace_couplings(net, out)
