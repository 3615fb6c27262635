import numpy as np
import pytest

from nystromlab.experiments import (
    derive_seed,
    generalization_experiment,
    generalization_trial,
    hs_trials,
    loglog_slope,
    lowerbound_trial,
    run_trials,
    scaling_experiment,
    trial_seeds,
)
from nystromlab.synth import SpectrumSpec, power_law_spectrum, synth_kernel


def test_derive_seed_is_seedsequence_hash():
    expected = int(np.random.SeedSequence([3, 7]).generate_state(1, np.uint64)[0])
    assert derive_seed(3, 7) == expected
    seeds = trial_seeds(0, 100)
    assert len(set(seeds)) == 100 and all(0 <= s < 2**64 for s in seeds)
    assert trial_seeds(0, 5) == seeds[:5]


def test_run_trials_preserves_order():
    items = list(range(50))
    assert run_trials(lambda x: x * x, items, workers=8) == [x * x for x in items]


def test_loglog_slope_exact():
    m = np.array([10, 20, 40])
    assert loglog_slope(m, 3.0 * m**-1.5) == pytest.approx(-1.5)


def test_scaling_experiment_deterministic_across_workers():
    K, _ = synth_kernel(SpectrumSpec(power_law_spectrum(200, 2.0, scale_N=True), seed=0))
    a = scaling_experiment(K, [10, 20, 40], trial_seeds(1, 4), workers=1)
    b = scaling_experiment(K, [10, 20, 40], trial_seeds(1, 4), workers=4)
    assert a == b
    assert len(a["rows"]) == 12 and a["slope"] < 0


def test_scaling_experiment_callable_source():
    K, _ = synth_kernel(SpectrumSpec(power_law_spectrum(100, 2.0, scale_N=True), seed=0))
    assert scaling_experiment(lambda m: K, [10, 20], [1, 2]) == scaling_experiment(K, [10, 20], [1, 2])


def test_lowerbound_trial_fields():
    t = lowerbound_trial(256, 3, 5, samplings=3)
    assert len(t["top_eigenvalues"]) == 4 and len(t["errors"]) == 3
    assert t["lower_general"] == 256 / 8
    assert all(e >= 0 for e in t["errors"])


def test_hs_trials_length():
    K, _ = synth_kernel(SpectrumSpec(power_law_spectrum(50, 2.0), seed=0))
    assert len(hs_trials(K, 10, [1, 2, 3])) == 3


def test_generalization_trial_full_rank_row():
    res = generalization_trial(200, 2.8, 3, m=40, lam_grid=(1e-2,), n_test=200, n_val=100, n_freq=256,
                               tol=1e-10, include_full_rank=True)
    rows = {r["m"]: r for r in res["restricted"]}
    assert set(rows) == {20, 40, 80, 200}
    assert abs(rows[200]["gap"]) <= 1e-6
    assert all(r["support"] <= r["m"] for r in rows.values())


def test_generalization_experiment_aggregates():
    res = generalization_experiment(150, 3.0, [1, 2], workers=2, lam_grid=(1e-2,), n_test=100, n_val=50, n_freq=128)
    assert res["recommended_m"] == int(np.ceil(150**0.75))
    assert set(res["median_gap"]) == {r["m"] for r in res["trials"][0]["restricted"]}
