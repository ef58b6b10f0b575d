from fractions import Fraction

import pytest

from milac.complexity import (
    ComplexityModel,
    Realization,
    Task,
    complexity_rows,
    dft_saving,
    estimator_counts,
    gain,
    ops_per_block,
    rzfbf_design_ops,
    write_complexity_csv,
)
from milac.estimators import Kind

D, A = Realization.DIGITAL, Realization.MILAC


def ops(task, real, **kw):
    return ops_per_block(ComplexityModel(task, real, **kw))


def test_milac_zero_forcing_small():
    assert ops(Task.ZERO_FORCING, A, n_r=4) == 96


def test_matched_filtering_8192():
    assert ops(Task.MATCHED_FILTERING, D, n_r=8192, tau=100) == 53_687_091_200
    assert ops(Task.MATCHED_FILTERING, A, n_r=8192, tau=100) == 268_435_456


def test_dft_8192():
    saved = dft_saving(8192, 100)
    assert saved == round(Fraction(34, 9) * 8192 * 13 * 100)
    assert saved.denominator == 1
    assert f"{float(saved):.1e}" == "4.0e+07"
    assert ops(Task.DFT, A, n_r=8192, tau=100) == 0


def test_zero_forcing_gain_8192():
    g = gain(Task.ZERO_FORCING, 8192, 100)
    expect = (8 * (8192**3 + Fraction(8192**3, 3)) + 8 * 8192**2 * 100) / (6 * 8192**2)
    assert g == expect
    assert float(g) == pytest.approx(14696.89, abs=0.01)
    assert f"{float(g):.1e}" == "1.5e+04"


def test_matched_filtering_gain_is_two_tau():
    for n in (1, 7, 64, 8192):
        assert gain(Task.MATCHED_FILTERING, n, 100) == 200
    assert gain(Task.MATCHED_FILTERING, 5, 13) == 26


def test_zero_forcing_gain_smallest_case():
    assert gain(Task.ZERO_FORCING, 1, 1) == (8 * Fraction(4, 3) + 8) / 6


def test_dft_gain_undefined():
    with pytest.raises(ValueError):
        gain(Task.DFT, 8, 100)


def test_rectangular_zero_forcing_uses_smaller_dimension():
    tx = ops(Task.ZERO_FORCING, D, n_r=4, n_t=16, tau=1)
    assert tx == 8 * (16 * 16 + Fraction(64, 3)) + 8 * 64
    rx = ops(Task.ZERO_FORCING, D, n_r=16, n_t=4, tau=1)
    assert rx == tx


def test_milac_zero_forcing_quadratic():
    for n in (2**k for k in range(6, 14)):
        assert ops(Task.ZERO_FORCING, A, n_r=2 * n) / ops(Task.ZERO_FORCING, A, n_r=n) == 4


def test_digital_zero_forcing_cubic():
    ratios = [ops(Task.ZERO_FORCING, D, n_r=2**k, tau=100) / Fraction(2**k) ** 3 for k in range(6, 14)]
    target = Fraction(32, 3)
    errs = [abs(r - target) for r in ratios]
    assert all(a > b for a, b in zip(errs, errs[1:]))
    assert float(errs[-1]) < 0.1


def test_estimator_counts():
    assert estimator_counts(Kind.OMF, 4, 4) == (64, 128)
    assert estimator_counts(Kind.LMMSE, 2, 2) == (24, Fraction(448, 3))
    assert estimator_counts(Kind.RLS, 4, 8)[1] == 8 * min(128 + Fraction(64, 3), 256 + Fraction(512, 3))
    assert estimator_counts(Kind.GMF, 2, 3) == (24, 8 * (4 + 6 + 9))
    assert estimator_counts(Kind.GLS, 3, 2) == (36, 8 * (12 + 18 + Fraction(8, 3)))
    with pytest.raises(ValueError):
        estimator_counts(Kind.OLS, 0, 2)


def test_per_symbol_product():
    assert ops(Task.PER_SYMBOL_PRODUCT, D, n_rf=8, n_s=4) == 256
    assert ops(Task.PER_SYMBOL_PRODUCT, D, n_rf=8, n_s=4, tau=10) == 2560


def test_generic_lmmse_matches_estimator_counts():
    assert ops(Task.GENERIC_LMMSE, D, n_t=2, n_r=3) == estimator_counts(Kind.LMMSE, 2, 3)[1]
    assert ops(Task.GENERIC_LMMSE, A, n_t=2, n_r=3) == 36


def test_missing_dimension_is_config_error():
    with pytest.raises(ValueError, match="n_r"):
        ops(Task.ZERO_FORCING, D)
    with pytest.raises(ValueError, match="n_rf"):
        ops(Task.PER_SYMBOL_PRODUCT, D, n_s=2)
    with pytest.raises(ValueError):
        ComplexityModel(Task.DFT, D, n_r=4, tau=0)


def test_large_array_costs_like_small_digital():
    ratio = rzfbf_design_ops(256, 256, D) / rzfbf_design_ops(4096, 4096, A)
    assert Fraction(1, 2) <= ratio <= 2


def test_counts_are_exact_and_deterministic():
    a = ops(Task.ZERO_FORCING, D, n_r=3, tau=7)
    assert isinstance(a, Fraction)
    assert a == ops(Task.ZERO_FORCING, D, n_r=3, tau=7)


def test_csv(tmp_path):
    rows = complexity_rows([64, 8192], 100)
    write_complexity_csv(rows, tmp_path / "c.csv")
    lines = (tmp_path / "c.csv").read_text().splitlines()
    assert lines[0] == "task,realization,n_t,n_r,tau,ops_exact,ops_sci,gain"
    zf = [ln for ln in lines if ln.startswith("zero-forcing,digital,8192")][0].split(",")
    assert float(zf[-1]) == pytest.approx(14696.89, abs=0.01)
    assert zf[5].endswith("/3")
    assert len(lines) == 1 + 3 * 2 * 2
