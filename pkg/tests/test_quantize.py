import numpy as np
import pytest
from scipy import integrate
from scipy.stats import norm

from milac.beamforming import BeamformerSpec, Normalization, Side, Strategy, lmmse_inspired_network
from milac.network import p_matrix
from milac.quantize import QuantizerCodebook, lloyd_max_codebook, quantize, quantize_network

from conftest import crandn


def test_one_bit_levels_closed_form():
    cb = lloyd_max_codebook(1)
    assert np.allclose(cb.levels, [-np.sqrt(2 / np.pi), np.sqrt(2 / np.pi)], atol=1e-12)
    assert cb.sqnr_db == pytest.approx(10 * np.log10(1 / (1 - 2 / np.pi)), abs=1e-9)


@pytest.mark.parametrize("bits, sqnr", [(1, 4.40), (2, 9.30), (4, 20.2)])
def test_sqnr_values(bits, sqnr):
    assert lloyd_max_codebook(bits).sqnr_db == pytest.approx(sqnr, abs=0.1)


@pytest.mark.parametrize("bits", [1, 2, 3, 4])
def test_codebook_fixed_point(bits):
    cb = lloyd_max_codebook(bits)
    assert len(cb.levels) == 2**bits
    assert np.all(np.diff(cb.levels) > 0)
    assert np.array_equal(cb.levels, -cb.levels[::-1])
    assert np.allclose(cb.thresholds, 0.5 * (cb.levels[1:] + cb.levels[:-1]), rtol=0, atol=1e-15)
    # centroid condition by numerical integration
    edges = np.concatenate([[-np.inf], cb.thresholds, [np.inf]])
    for c, lo, hi in zip(cb.levels, edges[:-1], edges[1:]):
        num = integrate.quad(lambda x: x * norm.pdf(x), lo, hi, epsabs=1e-14)[0]
        den = norm.cdf(hi) - norm.cdf(lo)
        assert num / den == pytest.approx(c, abs=1e-10)
    assert cb.cell_probabilities.sum() == pytest.approx(1)


def test_mse_matches_numerical_integration():
    cb = lloyd_max_codebook(2)
    edges = np.concatenate([[-np.inf], cb.thresholds, [np.inf]])
    mse = sum(integrate.quad(lambda x: (x - c) ** 2 * norm.pdf(x), lo, hi)[0]
              for c, lo, hi in zip(cb.levels, edges[:-1], edges[1:]))
    assert cb.mse == pytest.approx(mse, rel=1e-9)


def test_empirical_sqnr_on_complex_sample():
    # two bits per complex value: one bit per real dimension
    rng = np.random.default_rng(5)
    cb = lloyd_max_codebook(1)
    z = crandn(rng, 10**6) * np.sqrt(2)
    q = quantize(z.real, cb) + 1j * quantize(z.imag, cb)
    sqnr = 10 * np.log10(np.mean(z.real**2) / np.mean((z.real - q.real) ** 2))
    assert sqnr == pytest.approx(4.40, abs=0.1)


def _perturbed(cb, i, d):
    lv = cb.levels.copy()
    lv[i] += d
    return QuantizerCodebook(cb.bits, lv, 0.5 * (lv[1:] + lv[:-1]))


@pytest.mark.parametrize("bits", [1, 2, 4])
def test_level_perturbation_increases_exact_mse(bits):
    cb = lloyd_max_codebook(bits)
    for i in range(len(cb.levels)):
        for d in (1e-3, -1e-3):
            assert _perturbed(cb, i, d).mse > cb.mse


@pytest.mark.parametrize("bits", [1, 2, 4])
def test_level_perturbation_increases_sample_mse(bits):
    # stratified draw: i.i.d. sampling moves cell centroids by ~1e-3 at this size
    x = norm.ppf((np.arange(10**6) + 0.5) / 10**6)
    cb = lloyd_max_codebook(bits)

    def emp_mse(c):
        return np.mean((x - quantize(x, c)) ** 2)

    base = emp_mse(cb)
    for i in range(len(cb.levels)):
        for d in (1e-3, -1e-3):
            assert emp_mse(_perturbed(cb, i, d)) > base


def test_quantize_scales_codebook():
    cb = lloyd_max_codebook(1)
    assert np.allclose(quantize([-3.0, 0.1, 5.0], cb, scale=2.0), 2 * np.sqrt(2 / np.pi) * np.array([-1, 1, 1]))


def test_quantize_network(rng):
    h = crandn(rng, 4, 4)
    net = lmmse_inspired_network(BeamformerSpec(Strategy.RZFBF, Side.TRANSMITTER, 0.4, Normalization.FROBENIUS), h, 0.02)
    assert quantize_network(net, None) is net
    cb = lloyd_max_codebook(1)
    q = quantize_network(net, cb)
    off = ~np.eye(8, dtype=bool)
    # exactly zero components stay absent
    assert np.array_equal(q.components[off] == 0, net.components[off] == 0)
    # each off-diagonal P block uses at most 2 x 2 distinct values
    n = 4
    for blk in (q.components[:n, n:], q.components[n:, :n]):
        assert len(np.unique(blk.real.round(15))) <= 2 and len(np.unique(blk.imag.round(15))) <= 2
    assert np.allclose(np.diag(p_matrix(q).full), np.diag(p_matrix(net).full))
