"""Monte-Carlo link simulation: sum rate of multi-user precoders and BER of
single-user combiners, digital versus network-realized.

Every trial draws from its own generator keyed by ``(seed, trial)``, so a
result never depends on how trials are scheduled across workers. The same
channel and noise realizations are reused across the SNR grid and across
strategies, which makes digital and analog paths directly comparable.
"""

import csv
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .beamforming import (
    BeamformerSpec,
    Normalization,
    Side,
    Strategy,
    arbitrary_rx_network,
    arbitrary_tx_network,
    combiner_digital,
    lmmse_inspired_network,
    optimal_lambda,
    precoder_digital,
)
from .network import effective_matrix, scale_output, simulate_nodal
from .numerics import SingularMatrixError, as_matrix
from .quantize import lloyd_max_codebook, quantize_network

__all__ = [
    "LinkConfig",
    "CurveRow",
    "CSV_COLUMNS",
    "trial_rng",
    "rayleigh_channel",
    "qpsk_map",
    "qpsk_demap",
    "sum_rate",
    "noisy_csi",
    "parse_strategy",
    "run_sumrate_experiment",
    "run_ber_experiment",
    "rayleigh_qpsk_ber",
    "write_curve_csv",
    "SumRateResult",
    "BerResult",
]

log = logging.getLogger(__name__)

#: Column order of curve CSV files.
CSV_COLUMNS = ("strategy", "n_t", "n_r", "snr_db", "trials", "mean_metric", "stderr")

REALIZATIONS = ("digital", "milac-arbit", "milac-lmmse")


@dataclass(frozen=True)
class LinkConfig:
    n_t: int = 4
    n_r: int = 4
    snr_db: tuple = (-10, -5, 0, 5, 10, 15, 20, 25, 30)
    trials: int = 2000
    symbols_per_trial: int = 100
    seed: int = 0
    tx_power: float = 1.0
    y0: float = 0.02

    def __post_init__(self):
        object.__setattr__(self, "snr_db", tuple(float(s) for s in np.atleast_1d(self.snr_db)))
        if self.trials < 1:
            raise ValueError(f"trials must be >= 1, got {self.trials}")
        if self.n_t < 1 or self.n_r < 1:
            raise ValueError("antenna counts must be >= 1")
        if self.symbols_per_trial < 1:
            raise ValueError("symbols_per_trial must be >= 1")
        if not self.tx_power > 0:
            raise ValueError("tx_power must be positive")

    def noise_power(self, snr_db):
        return self.tx_power * 10 ** (-snr_db / 10)


@dataclass(frozen=True)
class CurveRow:
    strategy: str
    n_t: int
    n_r: int
    snr_db: float
    trials: int
    mean_metric: float
    stderr: float

    def as_tuple(self):
        return tuple(getattr(self, c) for c in CSV_COLUMNS)


def trial_rng(seed, trial):
    """PCG64 stream for one trial, independent of every other trial."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([int(seed), int(trial)])))


def _cn(rng, shape, var=1.0):
    return np.sqrt(var / 2) * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))


def rayleigh_channel(n_r, n_t, rng):
    """i.i.d. ``CN(0, 1)`` channel matrix."""
    return _cn(rng, (n_r, n_t))


def noisy_csi(h, rho_db, rng):
    """Channel estimate ``h + e`` with ``e ~ CN(0, 10**(-rho_db/10))`` per entry."""
    h = as_matrix(h, "H")
    if np.isinf(rho_db) and rho_db > 0:
        return h.copy()
    return h + _cn(rng, h.shape, 10 ** (-rho_db / 10))


# Gray mapping: first bit -> sign of I, second bit -> sign of Q (0 -> +).
def qpsk_map(bits):
    """Map bit pairs to unit-energy QPSK symbols ``(+-1 +-1j) / sqrt(2)``."""
    bits = np.asarray(bits, dtype=np.int8)
    if bits.shape[-1] % 2:
        raise ValueError("bit stream length must be even")
    b = bits.reshape(bits.shape[:-1] + (-1, 2))
    return ((1 - 2 * b[..., 0]) + 1j * (1 - 2 * b[..., 1])) / np.sqrt(2)


def qpsk_demap(z):
    """Hard decision by the sign of each dimension; inverse of :func:`qpsk_map`."""
    z = np.asarray(z)
    b = np.stack([z.real < 0, z.imag < 0], axis=-1).astype(np.int8)
    return b.reshape(z.shape[:-1] + (-1,))


def _user_sinr(h, w, p_t, sigma2):
    g = np.abs(h @ w) ** 2 * (p_t / h.shape[0])
    signal = np.diag(g)
    interference = g.sum(axis=1) - signal
    return signal / (interference + sigma2)


def sum_rate(h, w, p_t, sigma2):
    """Sum of ``log2(1 + SINR_k)`` with power ``p_t / N_R`` per user.

    User ``k`` sees row ``k`` of `h` and is served by column ``k`` of `w`;
    interference from other users' beams is treated as noise.
    """
    h, w = as_matrix(h, "H"), as_matrix(w, "W")
    return float(np.sum(np.log2(1 + _user_sinr(h, w, p_t, sigma2))))


def parse_strategy(label):
    """Split ``"realization/strategy"`` (e.g. ``"milac-lmmse/R-ZFBF"``)."""
    try:
        realization, name = label.split("/")
    except ValueError:
        raise ValueError(f"strategy must look like 'digital/ZF', got {label!r}") from None
    realization = realization.strip().lower()
    if realization not in REALIZATIONS:
        raise ValueError(f"unknown realization {realization!r}; choose from {REALIZATIONS}")
    return realization, Strategy(name.strip())


def _map_trials(fn, trials, workers):
    if workers is None or workers <= 1:
        return [fn(t) for t in range(trials)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, range(trials)))


# -- sum rate -----------------------------------------------------------------


@dataclass
class SumRateResult:
    """Per-trial sum rates, ``rates[label]`` of shape ``(trials, len(snr_db))``."""

    config: LinkConfig
    rates: dict
    redraws: int = 0
    attempts: int = 0
    extra: dict = field(default_factory=dict)

    def rows(self):
        cfg = self.config
        out = []
        for label, r in self.rates.items():
            for j, snr in enumerate(cfg.snr_db):
                col = r[:, j]
                se = col.std(ddof=1) / np.sqrt(len(col)) if len(col) > 1 else 0.0
                out.append(CurveRow(label, cfg.n_t, cfg.n_r, snr, len(col), float(col.mean()), float(se)))
        return out


def _precoder(realization, strategy, h_design, lam, y0, codebook):
    if realization == "digital":
        return precoder_digital(strategy, h_design, lam, Normalization.PER_COLUMN)
    if realization == "milac-arbit":
        w = precoder_digital(strategy, h_design, lam, Normalization.PER_COLUMN)
        net = arbitrary_tx_network(w, y0)
    else:
        spec = BeamformerSpec(strategy, Side.TRANSMITTER, lam, Normalization.FROBENIUS)
        net = lmmse_inspired_network(spec, h_design, y0)
    if codebook is None:
        return effective_matrix(net)
    net = quantize_network(net, codebook)
    w = effective_matrix(net)
    if realization == "milac-lmmse":
        # the quantized blocks lose power; restore ||W||_F^2 = N_R on the codebook grid
        c = np.sqrt(w.shape[1]) / np.linalg.norm(w)
        w = effective_matrix(scale_output(net, c))
    return w


def run_sumrate_experiment(cfg, strategies, csi_rho_db=None, quant_bits=None, workers=None,
                           max_redraws=100):
    """Mean sum rate per strategy and SNR for the multi-user downlink.

    Parameters
    ----------
    strategies : list of str
        Labels ``"<realization>/<precoder>"`` with realization ``digital``,
        ``milac-arbit`` (network set from the digitally computed precoder) or
        ``milac-lmmse`` (network computes the precoder itself).
    csi_rho_db : float, optional
        Design the precoders on :func:`noisy_csi` at this CSI SNR.
    quant_bits : int, optional
        Bits per complex component; each real dimension of the off-diagonal
        network components gets ``quant_bits // 2`` bits. Digital precoders
        are unaffected.

    A trial whose channel makes a required inverse singular is redrawn from
    the same trial stream and the redraw is logged.
    """
    if cfg.n_r > cfg.n_t:
        raise ValueError("multi-user precoding needs n_r <= n_t")
    parsed = [parse_strategy(s) for s in strategies]
    for _, st in parsed:
        if st not in (Strategy.RZFBF, Strategy.ZFBF, Strategy.MBF):
            raise ValueError(f"{st.value} is not a transmit precoder")
    codebook = None
    if quant_bits is not None:
        if quant_bits < 2 or quant_bits % 2:
            raise ValueError("quant_bits must be an even number >= 2")
        codebook = lloyd_max_codebook(quant_bits // 2)
    sigma2 = [cfg.noise_power(s) for s in cfg.snr_db]

    def one_trial(t):
        rng = trial_rng(cfg.seed, t)
        for attempt in range(max_redraws + 1):
            h = rayleigh_channel(cfg.n_r, cfg.n_t, rng)
            h_design = h if csi_rho_db is None else noisy_csi(h, csi_rho_db, rng)
            try:
                out = np.empty((len(parsed), len(sigma2)))
                cache = {}
                for i, (real, st) in enumerate(parsed):
                    for j, s2 in enumerate(sigma2):
                        lam = optimal_lambda(cfg.n_r, cfg.tx_power, s2)
                        key = (real, st, lam if st is Strategy.RZFBF else None)
                        if key not in cache:
                            cache[key] = _precoder(real, st, h_design, lam, cfg.y0,
                                                   codebook if real != "digital" else None)
                        out[i, j] = sum_rate(h, cache[key], cfg.tx_power, s2)
                return out, attempt
            except SingularMatrixError as err:
                log.warning("trial %d: singular channel (%s); redrawing", t, err)
        raise SingularMatrixError(f"trial {t}: {max_redraws} consecutive singular draws")

    results = _map_trials(one_trial, cfg.trials, workers)
    stacked = np.stack([r for r, _ in results])
    redraws = sum(a for _, a in results)
    rates = {s: stacked[:, i, :] for i, s in enumerate(strategies)}
    return SumRateResult(cfg, rates, redraws=redraws, attempts=cfg.trials + redraws)


# -- BER ----------------------------------------------------------------------


@dataclass
class BerResult:
    """Bit-error counts ``errors[label]`` of shape ``(trials, len(snr_db))``."""

    config: LinkConfig
    errors: dict
    bits_per_trial: int
    redraws: int = 0
    attempts: int = 0

    def rows(self):
        cfg = self.config
        out = []
        for label, e in self.errors.items():
            n_bits = e.shape[0] * self.bits_per_trial
            for j, snr in enumerate(cfg.snr_db):
                ber = e[:, j].sum() / n_bits
                se = np.sqrt(ber * (1 - ber) / n_bits)
                out.append(CurveRow(label, cfg.n_t, cfg.n_r, snr, e.shape[0], float(ber), float(se)))
        return out


def _combiner(realization, strategy, h, lam, y0):
    """What the receiver applies to ``y``: a matrix or a network."""
    if realization == "digital":
        return combiner_digital(strategy, h, lam)
    if realization == "milac-arbit":
        return arbitrary_rx_network(combiner_digital(strategy, h, lam), y0)
    return lmmse_inspired_network(BeamformerSpec(strategy, Side.RECEIVER, lam), h, y0)


def _apply(combiner, y):
    if isinstance(combiner, np.ndarray):
        return combiner @ y
    return simulate_nodal(combiner, y, check_conditioning=False)[1]


def run_ber_experiment(cfg, strategies, workers=None, max_redraws=100):
    """Uncoded QPSK BER of single-user MIMO with linear combining.

    ``x`` carries ``n_t`` Gray-mapped QPSK streams with ``E||x||^2 =
    tx_power``; ``y = H x + n``; the combiner output is sliced per
    dimension. Labels are ``"<realization>/<MMSE|ZF|MF>"``; all labels see
    the same channel, bits and noise in each trial.
    """
    if cfg.n_r < cfg.n_t:
        raise ValueError("single-user combining needs n_r >= n_t")
    parsed = [parse_strategy(s) for s in strategies]
    for _, st in parsed:
        if st not in (Strategy.MMSE, Strategy.ZF, Strategy.MF):
            raise ValueError(f"{st.value} is not a receive combiner")
    n_sym = cfg.symbols_per_trial
    amp = np.sqrt(cfg.tx_power / cfg.n_t)
    sigma2 = [cfg.noise_power(s) for s in cfg.snr_db]

    def one_trial(t):
        rng = trial_rng(cfg.seed, t)
        for attempt in range(max_redraws + 1):
            h = rayleigh_channel(cfg.n_r, cfg.n_t, rng)
            bits = rng.integers(0, 2, size=(n_sym, 2 * cfg.n_t), dtype=np.int8)
            x = amp * qpsk_map(bits).T
            noise = _cn(rng, (cfg.n_r, n_sym))
            try:
                out = np.empty((len(parsed), len(sigma2)), dtype=np.int64)
                cache = {}
                for j, s2 in enumerate(sigma2):
                    y = h @ x + np.sqrt(s2) * noise
                    lam = optimal_lambda(cfg.n_t, cfg.tx_power, s2)
                    for i, (real, st) in enumerate(parsed):
                        # ZF is the only combiner independent of the noise level
                        key = (real, st, None if st is Strategy.ZF else lam)
                        if key not in cache:
                            cache[key] = _combiner(real, st, h, lam, cfg.y0)
                        z = _apply(cache[key], y)
                        out[i, j] = np.count_nonzero(qpsk_demap(z.T) != bits)
                return out, attempt
            except SingularMatrixError as err:
                log.warning("trial %d: singular channel (%s); redrawing", t, err)
        raise SingularMatrixError(f"trial {t}: {max_redraws} consecutive singular draws")

    results = _map_trials(one_trial, cfg.trials, workers)
    stacked = np.stack([r for r, _ in results])
    redraws = sum(a for _, a in results)
    errors = {s: stacked[:, i, :] for i, s in enumerate(strategies)}
    return BerResult(cfg, errors, bits_per_trial=2 * cfg.n_t * n_sym, redraws=redraws,
                     attempts=cfg.trials + redraws)


def rayleigh_qpsk_ber(snr_db):
    """Average BER of Gray QPSK over a 1x1 Rayleigh channel with coherent equalization.

    Each dimension is BPSK at average per-bit SNR ``SNR / 2``.
    """
    gamma = 10 ** (np.asarray(snr_db, dtype=float) / 10) / 2
    return 0.5 * (1 - np.sqrt(gamma / (1 + gamma)))


def write_curve_csv(rows, path):
    with open(path, "w", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for r in rows:
            writer.writerow([r.strategy, r.n_t, r.n_r, repr(r.snr_db), r.trials,
                             repr(r.mean_metric), repr(r.stderr)])
