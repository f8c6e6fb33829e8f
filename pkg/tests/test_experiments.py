import numpy as np
import pytest

from mzfringe import (
    CountRecord,
    Crystal,
    QkdSpec,
    Waveplate,
    closed_form_contrast,
    contrast_shared_env,
    default_beta_grid,
    fit_fringe,
    maximally_mixed,
    poisson_fringe,
    predicted_visibility,
    qkd_visibility,
    standard_config,
    sweep,
)


def test_standard_config_crystal_layout():
    beta = 0.31
    spec = standard_config("a", beta)
    assert spec.upper == [Crystal(0.0, 310.0), Crystal(beta, 150.0)]
    assert spec.lower == [Crystal(beta, 150.0), Crystal(0.0, 310.0)]
    np.testing.assert_allclose(spec.input_state, maximally_mixed(2))


def test_standard_config_waveplate_variant():
    spec = standard_config("d", 0.9)
    assert spec.upper == [Waveplate(np.pi / 8)]
    assert spec.lower == [Waveplate(0.9)]


def test_standard_config_rejects_unknown_variant():
    with pytest.raises(ValueError):
        standard_config("e", 0.1)


def test_closed_forms_at_named_points():
    assert predicted_visibility("a", np.pi / 4) == pytest.approx(0.5)
    assert predicted_visibility("b", np.pi / 3) == pytest.approx(0.25)
    assert predicted_visibility("c", np.pi / 4) == pytest.approx(0.0, abs=1e-15)
    assert predicted_visibility("b", 0.0) == pytest.approx(1.0)


def test_closed_form_sign_flips_for_third_config():
    c = closed_form_contrast("c", np.pi / 3)
    assert c == pytest.approx(-0.125)
    assert predicted_visibility("c", np.pi / 3) == pytest.approx(0.125)
    f = contrast_shared_env(standard_config("c", np.pi / 3))
    assert f.visibility == pytest.approx(0.125, abs=1e-12)
    assert abs(f.fringe_phase) == pytest.approx(np.pi, abs=1e-9)


@pytest.mark.parametrize("variant", ["a", "b", "c"])
def test_sweep_matches_closed_forms(variant):
    rows = sweep(variant, default_beta_grid(25))
    for row in rows:
        assert abs(abs(row.v_closed_form) - row.v_simulated) < 1e-9
        assert abs(row.v_simulated - row.v_oracle) < 1e-9


def test_sweep_even_in_beta_for_second_config():
    for beta in np.linspace(0, np.pi / 2, 7):
        assert predicted_visibility("b", beta) == pytest.approx(
            predicted_visibility("b", -beta))


def test_waveplate_variant_curve():
    for beta in default_beta_grid(25):
        v = contrast_shared_env(standard_config("d", beta)).visibility
        assert abs(v - abs(np.cos(2 * (beta - np.pi / 8)))) < 1e-9
    assert contrast_shared_env(standard_config("d", np.pi / 8)).visibility \
        == pytest.approx(1.0, abs=1e-12)


def uniform_phases(n):
    return 2 * np.pi * np.arange(n) / n


def test_poisson_zero_expectation_gives_zero_counts():
    spec = standard_config("b", 0.0)  # unit visibility
    records = poisson_fringe(spec, [np.pi], 10_000, 7)
    assert records[0].expected == pytest.approx(0.0, abs=1e-9)
    assert records[0].counts == 0


def test_poisson_flat_fringe_statistics():
    spec = standard_config("c", np.pi / 4)  # zero contrast
    records = poisson_fringe(spec, uniform_phases(64), 10_000, 42)
    counts = np.array([r.counts for r in records])
    assert np.all(np.array([r.expected for r in records]) == pytest.approx(5000.0))
    assert abs(counts.mean() - 5000.0) < 5 * np.sqrt(5000.0 / 64)


def test_poisson_determinism_and_seed_sensitivity():
    spec = standard_config("a", np.pi / 8)
    a = poisson_fringe(spec, uniform_phases(32), 1000, 42)
    b = poisson_fringe(spec, uniform_phases(32), 1000, 42)
    c = poisson_fringe(spec, uniform_phases(32), 1000, 43)
    assert [r.counts for r in a] == [r.counts for r in b]
    assert [r.counts for r in a] != [r.counts for r in c]


def test_poisson_rejects_bad_arguments():
    spec = standard_config("a", 0.1)
    with pytest.raises(ValueError):
        poisson_fringe(spec, [0.0], 0, 1)
    with pytest.raises(ValueError):
        poisson_fringe(spec, [0.0], 10, -1)


def noiseless_records(amp, vis, psi, n=64):
    phis = uniform_phases(n)
    values = amp * (1 + vis * np.cos(phis + psi))
    return [CountRecord(float(p), v, v) for p, v in zip(phis, values)]


@pytest.mark.parametrize("vis", [0.0, 0.25, 0.5, 0.75, 1.0])
def test_fit_recovers_noiseless_fringe(vis):
    fit = fit_fringe(noiseless_records(5000.0, vis, 0.8))
    assert fit.converged
    assert abs(fit.visibility_hat - vis) < 1e-9
    assert fit.amplitude == pytest.approx(5000.0, abs=1e-6)


def test_fit_recovers_phase():
    fit = fit_fringe(noiseless_records(200.0, 0.6, -1.1))
    assert fit.phase_hat == pytest.approx(-1.1, abs=1e-9)


def test_fit_requires_enough_points():
    with pytest.raises(ValueError):
        fit_fringe(noiseless_records(100.0, 0.5, 0.0, n=3))


def test_fit_requires_span():
    records = [CountRecord(phi, 100.0, 100.0) for phi in np.linspace(0, 1.0, 10)]
    with pytest.raises(ValueError, match="span"):
        fit_fringe(records)


def test_fit_statistical_recovery():
    spec = standard_config("a", np.pi / 8)  # true visibility 0.75
    records = poisson_fringe(spec, uniform_phases(64), 10_000, 42)
    fit = fit_fringe(records)
    assert fit.converged
    assert abs(fit.visibility_hat - 0.75) < 3 * fit.stderr_visibility
    assert abs(fit.visibility_hat - 0.75) < 0.02


def test_qkd_identity_segments():
    spec = QkdSpec([], [], [], [], maximally_mixed(2))
    vis, qber = qkd_visibility(spec)
    assert vis == 1.0 and qber == 0.0


def test_qkd_matches_second_config():
    beta = np.pi / 3
    spec = QkdSpec(
        u1=[Crystal(beta, 310.0)], u2=[Crystal(0.0, 150.0)],
        u3=[Crystal(beta, 150.0)], u4=[Crystal(0.0, 310.0)],
        input_state=maximally_mixed(2),
    )
    vis, qber = qkd_visibility(spec)
    assert vis == pytest.approx(0.25, abs=1e-9)
    assert qber == pytest.approx(0.375, abs=1e-9)


def test_qber_monotone_in_visibility():
    results = []
    for beta in np.linspace(0, np.pi / 2, 10):
        spec = QkdSpec([Crystal(beta, 310.0)], [Crystal(0.0, 150.0)],
                       [Crystal(beta, 150.0)], [Crystal(0.0, 310.0)],
                       maximally_mixed(2))
        results.append(qkd_visibility(spec))
    for (v1, q1), (v2, q2) in zip(results, results[1:]):
        assert (q2 - q1) == pytest.approx((v1 - v2) / 2, abs=1e-12)
        assert 0.0 <= q1 <= 0.5 and 0.0 <= q2 <= 0.5
