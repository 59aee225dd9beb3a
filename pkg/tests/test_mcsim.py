import numpy as np
import pytest

from mmwb.mcsim import (AcceptanceCollapse, MatrixEnsembleConfig, SampleStats,
                        detailed_balance_audit, even_trace_powers,
                        fluctuation_series_report, fluctuation_test,
                        gue_trace_run, hessian_probe, iact, lambda_max,
                        metropolis_trace_run, read_trace_file,
                        run_observable_stats, sample_gibbs, sample_gue,
                        tail_test, trace_polynomial, write_trace_file)
from mmwb.ncpoly import Monomial, Polynomial, Potential
from mmwb.parsing import parse_polynomial
from mmwb.sdsolve import wick_finite_N


def quartic(t):
    return Potential([("t", t, Monomial((1, 1, 1, 1)))], m=1)


def test_gue_entry_normalization():
    rng_stream = sample_gue(40, m=2, seed=3)
    diag = []
    off_re = []
    off_im = []
    for _ in range(200):
        mats = next(rng_stream)
        for A in mats:
            assert np.array_equal(A, A.conj().T)
            diag.extend(np.diag(A).real)
            off_re.extend(A[np.triu_indices(40, 1)].real)
            off_im.extend(A[np.triu_indices(40, 1)].imag)
    N = 40
    assert abs(np.var(diag) * N - 1.0) < 0.05
    assert abs(np.var(off_re) * 2 * N - 1.0) < 0.02
    assert abs(np.var(off_im) * 2 * N - 1.0) < 0.02


def test_gue_reproducibility():
    a = next(sample_gue(12, m=1, seed=9))
    b = next(sample_gue(12, m=1, seed=9))
    assert np.array_equal(a, b)
    c = next(sample_gue(12, m=1, seed=10))
    assert not np.array_equal(a, c)


def test_even_trace_powers_match_direct_products():
    rng = np.random.default_rng(1)
    G = rng.standard_normal((30, 30))
    A = ((G + G.T) + 1j * (G - G.T)) / (2 * np.sqrt(30))
    tp = even_trace_powers(A, kmax=4)
    A2 = A @ A
    A4 = A2 @ A2
    assert abs(tp[2] - np.trace(A2).real) < 1e-10
    assert abs(tp[4] - np.trace(A4).real) < 1e-10
    assert abs(tp[6] - np.trace(A4 @ A2).real) < 1e-9
    assert abs(tp[8] - np.trace(A4 @ A4).real) < 1e-9


def test_trace_polynomial_words():
    rng = np.random.default_rng(2)
    mats = []
    for _ in range(2):
        G = rng.standard_normal((15, 15))
        mats.append(((G + G.T) + 1j * (G - G.T)) / (2 * np.sqrt(15)))
    P = parse_polynomial("x1*x2*x1 + 2*x2^2", backend="float")
    direct = np.trace(mats[0] @ mats[1] @ mats[0]) + 2 * np.trace(mats[1] @ mats[1])
    assert abs(trace_polynomial(mats, P) - direct.real) < 1e-9


def test_gue_moments_match_wick_rational_functions():
    N = 40
    run = gue_trace_run(N, 2500, seed=11, powers=(2, 4, 6, 8))
    for p in (2, 4, 6, 8):
        stats = run.stats(f"tr{p}")
        expected = wick_finite_N(Monomial((1,) * p)).evaluate(N)
        assert abs(stats.mean / N - expected) < 4 * stats.stderr / N + 1e-3, p


def test_iact_iid_is_near_one():
    rng = np.random.default_rng(4)
    x = rng.standard_normal(4000)
    assert iact(x) < 1.4
    stats = SampleStats.from_series(x)
    assert abs(stats.mean) < 4 * stats.stderr


def test_fluctuation_report_on_synthetic_gaussian():
    rng = np.random.default_rng(5)
    x = rng.normal(0.0, np.sqrt(2.0), size=20000)
    rep = fluctuation_series_report("synthetic", x, 2.0)
    assert rep.passed
    assert abs(rep.z_skew) < 4 and abs(rep.z_kurt) < 4
    rep_bad = fluctuation_series_report("synthetic", x, 3.0)
    assert not rep_bad.passed


def test_metropolis_free_measure_matches_gue():
    cfg = MatrixEnsembleConfig(N=30, potential=None, sampler="metropolis",
                               step=0.08, burn_in=3000, samples=3000,
                               seed=6, n_chains=2)
    run = metropolis_trace_run(cfg, powers=(2, 4))
    s2 = run.stats("tr2")
    assert abs(s2.mean / 30 - 1.0) < 5 * s2.stderr / 30 + 0.01
    assert 0.05 < run.acceptance_rates[0] < 0.9


def test_metropolis_reproducible_and_chain_prefix_stable():
    cfg = MatrixEnsembleConfig(N=16, potential=quartic(0.02), sampler="metropolis",
                               step=0.15, burn_in=50, samples=200, seed=7,
                               n_chains=2)
    r1 = metropolis_trace_run(cfg)
    r2 = metropolis_trace_run(cfg)
    assert np.array_equal(r1.traces["tr2"][0], r2.traces["tr2"][0])
    # chain 0 is untouched by adding chains: seeds are spawned per chain
    cfg3 = MatrixEnsembleConfig(N=16, potential=quartic(0.02), sampler="metropolis",
                                step=0.15, burn_in=50, samples=200, seed=7,
                                n_chains=3)
    r3 = metropolis_trace_run(cfg3)
    assert np.array_equal(r1.traces["tr2"][0], r3.traces["tr2"][0])


def test_acceptance_collapse():
    cfg = MatrixEnsembleConfig(N=24, potential=quartic(0.05), sampler="metropolis",
                               step=40.0, burn_in=400, samples=10, seed=8)
    with pytest.raises(AcceptanceCollapse):
        metropolis_trace_run(cfg)


def test_cutoff_rejection_contract():
    cfg = MatrixEnsembleConfig(N=24, potential=quartic(0.05), sampler="metropolis",
                               step=0.12, burn_in=300, samples=40, seed=9,
                               cutoff=2.5, thinning=5)
    for mats in sample_gibbs(cfg):
        assert lambda_max(mats) < 2.5


def test_langevin_smoke_and_cutoff():
    cfg = MatrixEnsembleConfig(N=24, potential=quartic(0.05), sampler="langevin",
                               step=0.02, burn_in=400, samples=30, seed=10,
                               cutoff=3.0, thinning=5)
    vals = []
    for mats in sample_gibbs(cfg):
        assert np.allclose(mats[0], mats[0].conj().T, atol=1e-6)
        assert lambda_max(mats) < 3.0
        vals.append(np.trace(mats[0] @ mats[0]).real / 24)
    assert 0.4 < np.mean(vals) < 1.2


def test_detailed_balance_audit():
    cfg = MatrixEnsembleConfig(N=12, potential=quartic(0.05), sampler="metropolis",
                               step=0.3, burn_in=0, samples=1, seed=11)
    assert detailed_balance_audit(cfg, n_pairs=40) < 1e-6


def test_hessian_probe_sees_convexity():
    cfg = MatrixEnsembleConfig(N=14, potential=quartic(0.05), sampler="metropolis",
                               step=0.2, burn_in=100, samples=4, seed=12)
    low = hessian_probe(cfg, n_states=2, n_dirs=8)
    # Tr W Hessian is bounded below by c = 1 for a convex quartic
    assert low > 0.9


def test_tail_frequencies():
    cfg = MatrixEnsembleConfig(N=20, potential=None, sampler="exact-gue", seed=13)
    rep = tail_test(cfg, 3.0, sizes=(16, 24, 32), samples=60)
    assert rep.passed
    assert all(f <= 0.2 for f in rep.frequencies)
    rep_bulk = tail_test(cfg, 1.0, sizes=(16, 24), samples=30)
    assert all(f >= 0.9 for f in rep_bulk.frequencies)


def test_fluctuation_test_free_case():
    cfg = MatrixEnsembleConfig(N=60, potential=None, sampler="exact-gue",
                               samples=4000, seed=14)
    rep = fluctuation_test(cfg, Polynomial.from_monomial(Monomial((1, 1))),
                           sigma2_pred=2.0, mu_pred=1.0)
    assert rep.passed
    assert rep.relative_error < 0.2


def test_fluctuation_two_colors_cross_word():
    # Tr(A1 A2) fluctuates with variance 1 (two one-slot stars, one gluing)
    cfg = MatrixEnsembleConfig(N=60, m=2, potential=None, sampler="exact-gue",
                               samples=4000, seed=16)
    rep = fluctuation_test(cfg, Polynomial.from_monomial(Monomial((1, 2))),
                           sigma2_pred=1.0, mu_pred=0.0)
    assert rep.passed
    assert rep.relative_error < 0.15


def test_run_observable_stats_and_streams():
    pot = quartic(0.02)
    cfg = MatrixEnsembleConfig(N=20, potential=pot, sampler="metropolis",
                               step=0.15, burn_in=200, samples=300, seed=15,
                               thinning=2, n_chains=2)
    stats = run_observable_stats(cfg, {"x1^2": parse_polynomial("x1^2", backend="float")})
    assert 0.5 < stats["x1^2"].mean < 1.2
    assert stats["x1^2"].ess > 10


def test_trace_file_round_trip(tmp_path):
    path = tmp_path / "trace.bin"
    data = np.arange(12, dtype=np.float64).reshape(6, 2)
    write_trace_file(path, data)
    back = read_trace_file(path)
    assert np.array_equal(back, data)
    raw = path.read_bytes()
    assert raw[:8] == b"MMWB0001"
    assert int.from_bytes(raw[8:16], "little") == 2
    bad = tmp_path / "bad.bin"
    bad.write_bytes(b"XXXXXXXX" + raw[8:])
    with pytest.raises(ValueError):
        read_trace_file(bad)


def test_spectral_escape_warning():
    from mmwb.mcsim import SpectralEscapeWarning

    cfg = MatrixEnsembleConfig(N=16, potential=None, sampler="exact-gue",
                               samples=3, seed=21, spectral_guard=0.5)
    with pytest.warns(SpectralEscapeWarning):
        list(sample_gibbs(cfg))


def test_config_validation():
    with pytest.raises(ValueError):
        MatrixEnsembleConfig(N=1)
    with pytest.raises(ValueError):
        MatrixEnsembleConfig(N=10, step=-1)
    with pytest.raises(ValueError):
        MatrixEnsembleConfig(N=10, cutoff=0.0)
    with pytest.raises(ValueError):
        MatrixEnsembleConfig(N=10, sampler="exact-gue", potential=quartic(0.1))
