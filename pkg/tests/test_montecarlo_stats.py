import math

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from narrowqec.montecarlo_stats import (FitParams, eval_fit, fit_curves, fitted_widths, pX_rect, pZ_rect,
                                        posterior_estimate, rate_from_trials, read_samples, reference_fit,
                                        sc_round, write_samples)


def test_shipped_values_by_hand():
    assert pZ_rect(3, 3, 1e-3) == pytest.approx(0.09 * 1 * 3 * 0.095**2)
    assert pZ_rect(3, 3, 1e-3) == pytest.approx(2.437e-3, rel=1e-3)
    assert pX_rect(3, 3, 1e-3) == pytest.approx(2.65e-3)
    assert sc_round(3, 1e-3) == pytest.approx(1.47e-3)
    assert fitted_widths("pZ_rect") == [3, 5, 7]


def test_unknown_width_or_kind():
    with pytest.raises(ValueError):
        pZ_rect(9, 9, 1e-3)
    with pytest.raises(ValueError):
        FitParams("bogus")
    with pytest.raises(ValueError):
        eval_fit(reference_fit("pZ_rect", 3), 5, 5, 1e-3)


@given(st.sampled_from([3, 5, 7]), st.integers(1, 30), st.floats(1e-6, 1e-3), st.floats(1.01, 3))
def test_monotone_in_p(d_X, k, p, factor):
    d_Z = 2 * k + 1
    assert pZ_rect(d_X, d_Z, p * factor) > pZ_rect(d_X, d_Z, p)
    assert pX_rect(d_X, d_Z, p * factor) > pX_rect(d_X, d_Z, p)


def _synthetic(alpha=0.09, beta=95.0, noise=0.0, seed=0):
    rng = np.random.default_rng(seed)
    f = FitParams("pZ_rect", 3, alpha=alpha, beta=beta)
    return [(3, dz, p, eval_fit(f, 3, dz, p) * math.exp(noise * rng.standard_normal()))
            for dz in (3, 5, 7, 9) for p in (2e-4, 5e-4, 1e-3)]


def test_recovers_pZ_parameters():
    f = fit_curves(_synthetic(noise=0.05))
    assert f.alpha == pytest.approx(0.09, rel=0.05)
    assert f.beta == pytest.approx(95, rel=0.05)


@given(st.floats(0.01, 100))
def test_fit_is_scale_consistent(c):
    base = fit_curves(_synthetic())
    scaled = fit_curves([(a, b, p, e * c) for a, b, p, e in _synthetic()])
    assert scaled.alpha == pytest.approx(base.alpha * c, rel=1e-6)
    assert scaled.beta == pytest.approx(base.beta, rel=1e-6)


def test_recovers_pX_quadratic():
    f = reference_fit("pX_rect", 5)
    pts = [(5, dz, p, eval_fit(f, 5, dz, p)) for dz in (5, 7, 9, 11) for p in (3e-4, 1e-3)]
    g = fit_curves(pts, "pX_rect")
    for dz in (5, 9, 15):
        assert eval_fit(g, 5, dz, 1e-3) == pytest.approx(eval_fit(f, 5, dz, 1e-3), rel=1e-3)


def test_fit_rejects_degenerate_input():
    with pytest.raises(ValueError):
        fit_curves([(3, dz, 1e-3, 1e-4) for dz in (3, 5, 7)])  # single p
    with pytest.raises(ValueError):
        fit_curves(_synthetic()[:2])
    with pytest.raises(ValueError):
        fit_curves([(3, 3, 1e-3, 1e-4), (5, 3, 2e-3, 1e-4), (3, 5, 1e-3, 1e-5)])


def test_posterior_examples():
    with pytest.raises(ValueError):
        posterior_estimate(0, 0)
    with pytest.raises(ValueError):
        posterior_estimate(5, 4)
    mean, (lo, hi) = posterior_estimate(450, 900)
    assert mean == pytest.approx(451 / 902)
    assert lo < 0.5 < hi


def test_nine_hundred_runs_give_ten_percent():
    # 900 failures in total trials N: the 3-sigma band is about +-3/sqrt(900) = +-10%
    mean, (lo, hi) = rate_from_trials(900, 9_000_000)
    assert (hi - lo) / 2 / mean == pytest.approx(0.10, abs=0.01)


@given(st.integers(1, 10**6), st.floats(0, 1))
def test_posterior_properties(n, frac):
    k = int(frac * n)
    assume(0 <= k <= n)
    mean, (lo, hi) = posterior_estimate(k, n)
    assert 0 < mean < 1
    assert lo <= mean <= hi


def test_csv_round_trip():
    pts = [(3, 5, 1e-3, 2.5e-4), (5, 7, 3e-4, 1e-7)]
    assert read_samples(write_samples(pts)) == pts
