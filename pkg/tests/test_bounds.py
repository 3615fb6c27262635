import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from nystromlab.bounds import (
    BOUND_NAMES,
    ConstantsConfig,
    best_eigengap_bound,
    compare,
    eigengap_bound,
    evaluate_bounds,
    incoherent_conditions,
    incoherent_rank_bound,
    incoherent_sample_threshold,
    lower_bounds,
    power_law_bound,
    power_law_rank,
    uniform_baseline_bound,
)
from nystromlab.errors import ConfigError
from nystromlab.linalg import eigh_descending
from nystromlab.synth import SpectrumSpec, eigengap_spectrum, power_law_spectrum, synth_kernel


def test_uniform_baseline():
    assert uniform_baseline_bound(100, 25, 3.0) == 3.0 + 20.0
    assert uniform_baseline_bound(100, 25, 3.0, c_dm=0.5) == 13.0


def test_eigengap_bound_arithmetic():
    expected = 16 * math.log(40) ** 2 * 1e6 / (50 * 200.0) + 7.0
    assert eigengap_bound(1000, 50, 200.0, 7.0, 0.05) == pytest.approx(expected, rel=1e-14)
    with pytest.raises(ConfigError):
        eigengap_bound(10, 2, 0.0, 0.0, 0.05)
    with pytest.raises(ConfigError):
        eigengap_bound(10, 2, 1.0, 0.0, 1.0)


@given(st.lists(st.floats(0.0, 1e3), min_size=2, max_size=30), st.integers(1, 50))
def test_best_eigengap_is_minimum_over_r(values, m):
    lam = np.sort(values)[::-1]
    N = lam.size
    val, r = best_eigengap_bound(lam, N, m, 0.1)
    brute = [eigengap_bound(N, m, lam[k - 1], lam[k], 0.1) for k in range(1, N) if lam[k - 1] > 0]
    if brute:
        assert val == pytest.approx(min(brute), rel=1e-12)
        assert eigengap_bound(N, m, lam[r - 1], lam[r], 0.1) == pytest.approx(val, rel=1e-12)
    else:
        assert r == 0


def test_incoherent_pieces():
    assert incoherent_rank_bound(2.0, 5, 100, 3.0) == 16 * 4 * 5 * 3.0 / 100
    c = ConstantsConfig()
    L = math.log(3 * 1000**3)
    assert incoherent_sample_threshold(1.5, 1000, c) == pytest.approx(2.25 * max(16 * math.log(1000) ** 2, 2 * L, 4 * L**2))
    assert power_law_rank(1.0, 1000, 1000, c) == math.floor(1000 / L)


def test_incoherent_conditions():
    c = ConstantsConfig()
    N = 100
    L = math.log(3 * N**3)
    r = int(L) + 20
    m_ok = int(math.ceil(max(r * L, 16 * math.log(N) ** 2)))
    assert incoherent_conditions(1.0, r, m_ok, N, c)
    assert not incoherent_conditions(1.0, r, r * r, N, c)
    assert not incoherent_conditions(1.0, 2, m_ok, N, c)


def test_power_law_bound_oracle():
    lam = power_law_spectrum(500, 2.0, scale_N=True)
    c = ConstantsConfig()
    m = 400
    r = int(math.floor(m / math.log(3 * 500**3)))
    assert power_law_bound(lam, 1.0, m, 500, c) == pytest.approx(max(16 * r / m, 1) * lam[r:].sum())


def test_lower_bounds():
    assert lower_bounds(4096, 5) == (4096 / 12, None)
    assert lower_bounds(100, 10, p=2) == (100 / 22, 1.0)
    with pytest.raises(ConfigError):
        lower_bounds(10, 0)


def test_constants_validation_and_note():
    with pytest.raises(ConfigError):
        ConstantsConfig(c_dm=0.0)
    d = ConstantsConfig().to_dict()
    assert d["c_dm"] == d["C_ab"] == d["gamma"] == 1.0 and "placeholder" in d["note"]


def test_evaluate_bounds_all_names():
    lam = power_law_spectrum(64, 2.0, scale_N=True)
    out, ctx = evaluate_bounds(lam, 2.0, 64, 8, 0.05, ConstantsConfig(), p=2.0)
    assert set(out) == set(BOUND_NAMES)
    assert out["uniform_baseline"] == pytest.approx(lam[8] + 64 / math.sqrt(8))
    assert out["lower_power_law"] == 1.0
    assert "eigengap_r" in ctx and "sample_threshold" in ctx


def test_compare_report_and_determinism():
    K, eig = synth_kernel(SpectrumSpec(power_law_spectrum(150, 2.0, scale_N=True), seed=1))
    reps = compare((K, eig), [10, 20], [1, 2, 3], p=2.0)
    again = compare((K, eig), [10, 20], [1, 2, 3], p=2.0, workers=3)
    assert [r.to_dict() for r in reps] == [r.to_dict() for r in again]
    d = reps[0].to_dict()
    assert set(d) == {"context", "bounds", "measured", "trials", "holds_fraction"}
    assert d["context"]["constants"]["note"]
    errs = [t["error"] for t in d["trials"]]
    assert d["measured"] == pytest.approx(np.median(errs))
    for name, frac in d["holds_fraction"].items():
        assert frac == np.mean([e <= d["bounds"][name] + 1e-9 for e in errs])
    # the error never goes below lambda_{m+1}
    assert min(errs) >= eig.eigenvalues[10] * (1 - 1e-9)


def test_compare_callable_source_and_checks():
    V = np.linalg.qr(np.random.default_rng(0).standard_normal((60, 60)))[0]

    def source(m):
        return synth_kernel(SpectrumSpec(eigengap_spectrum(60, m, 3, 0.25), "explicit", vectors=V))

    reps = compare(source, [4, 16], [0], which=("eigengap",), r=3)
    assert [r.context["m"] for r in reps] == [4, 16]
    assert reps[0].bounds["eigengap"] != reps[1].bounds["eigengap"]
    K = np.eye(5)
    with pytest.raises(ConfigError):
        compare((K, eigh_descending(K)), [6], [0])


def test_formula_examples():
    assert uniform_baseline_bound(1000, 100, 5.0, c_dm=0.0) == 5.0
    assert uniform_baseline_bound(1000, 100, 5.0) == 105.0
    assert eigengap_bound(100, 100, 100.0, 0.0, 2 / math.e) == pytest.approx(16.0, rel=1e-12)
    assert eigengap_bound(100, 100, 1e30, 3.0, 0.05) == pytest.approx(3.0)
    assert incoherent_rank_bound(1.0, 10, 160, 32.0) == 32.0 and incoherent_rank_bound(1.0, 10, 160, 0.0) == 0.0
    c = ConstantsConfig()
    L = math.log(3 * math.e**3)
    assert incoherent_sample_threshold(1.0, math.e, c) == pytest.approx(max(16.0, 2 * L, 4 * L * L))
    assert incoherent_sample_threshold(2.0, 500, c) == pytest.approx(4 * incoherent_sample_threshold(1.0, 500, c))
    assert lower_bounds(50, 49)[0] == pytest.approx(0.5)
    assert lower_bounds(64, 8, p=1)[1] == 8.0


def test_eigengap_bound_slope_in_regime():
    N, rho = 1500, 0.25
    ms = np.array([50, 100, 200, 400])
    vals = [eigengap_bound(N, m, N / m**rho, N / m ** (1 - rho), 0.05) for m in ms]
    slope = np.polyfit(np.log(ms), np.log(vals), 1)[0]
    assert slope == pytest.approx(-(1 - rho), abs=1e-6)


def test_exact_low_rank_kernel_error_below_every_bound():
    lam = np.zeros(80)
    lam[:4] = [40.0, 20.0, 10.0, 5.0]
    K, eig = synth_kernel(SpectrumSpec(lam, seed=0))
    rep = compare((K, eig), [10], [0, 1, 2], r=4)[0]
    assert rep.measured < 1e-9
    assert all(v == 1.0 for v in rep.holds_fraction.values())


def test_power_law_measured_slope_at_least_upper_bound_rate():
    from nystromlab.experiments import loglog_slope

    lam = power_law_spectrum(600, 2.0, scale_N=True)
    reps = compare(synth_kernel(SpectrumSpec(lam, seed=1)), [10, 20, 40, 80], [0, 1, 2, 3, 4], which=("power_law",))
    assert loglog_slope([10, 20, 40, 80], [r.measured for r in reps]) <= -(2 - 1) + 0.35


def test_eigengap_bound_holds_in_most_trials():
    V = np.linalg.qr(np.random.default_rng(1).standard_normal((300, 300)))[0]

    def source(m):
        return synth_kernel(SpectrumSpec(eigengap_spectrum(300, m, 5, 0.25), "explicit", vectors=V))

    reps = compare(source, [20, 40], list(range(20)), which=("eigengap",), r=5)
    assert all(r.holds_fraction["eigengap"] >= 0.95 for r in reps)
