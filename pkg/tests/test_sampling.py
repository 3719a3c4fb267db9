import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import stats

from entangle_mc import sampling as s
from entangle_mc.errors import ConfigError, RejectionBudgetExceeded
from entangle_mc.measures import concurrence, eof_from_concurrence
from entangle_mc.states import DensityMatrix, PureState


def gen(seed=0, stream=0):
    return s.RngStream(seed, stream).generator()


def test_streams_are_reproducible_and_distinct():
    a = s.RngStream(7, 3).generator().random(5)
    b = s.RngStream(7, 3).generator().random(5)
    c = s.RngStream(7, 4).generator().random(5)
    d = s.RngStream(7, 3, channel=1).generator().random(5)
    np.testing.assert_array_equal(a, b)
    assert not np.array_equal(a, c)
    assert not np.array_equal(a, d)


def test_haar_unitaries_are_unitary():
    u = s.haar_unitary(gen(), 100)
    np.testing.assert_allclose(u @ np.conj(np.swapaxes(u, 1, 2)), np.broadcast_to(np.eye(4), u.shape), atol=1e-13)


def test_haar_moments():
    u = s.haar_unitary(gen(1), 40000)
    p = np.abs(u) ** 2
    # |U_ij|^2 ~ Beta(1, 3): mean 1/4, second moment 1/10
    np.testing.assert_allclose(p.mean(axis=0), 0.25, atol=0.01)
    assert np.mean(p[:, 0, 0] ** 2) == pytest.approx(0.1, abs=0.004)
    tr = np.trace(u, axis1=1, axis2=2)
    assert np.mean(np.abs(tr) ** 2) == pytest.approx(1.0, abs=0.04)
    assert stats.kstest(p[:, 2, 1], stats.beta(1, 3).cdf).pvalue > 0.001


def test_haar_phase_fix_removes_bias():
    # without the phase correction the diagonal of Q is biased toward positive reals
    u = s.haar_unitary(gen(2), 40000)
    assert abs(np.mean(u[:, 0, 0].real)) < 0.01
    assert abs(np.mean(u[:, 0, 0].imag)) < 0.01


def test_simplex_is_dirichlet():
    w = s.uniform_simplex(gen(3), 40000)
    np.testing.assert_allclose(w.sum(axis=1), 1.0)
    assert np.all(w >= 0)
    assert stats.kstest(w[:, 1], stats.beta(1, 3).cdf).pvalue > 0.001
    assert np.mean(np.sum(w**2, axis=1)) == pytest.approx(0.4, abs=0.003)


def test_mixed_batch_matrices_are_states():
    batch = s.sample_mixed_batch(gen(4), 50)
    for rho in batch.matrices():
        DensityMatrix(rho)
    np.testing.assert_allclose(batch.purity(), np.sum(np.abs(batch.matrices()) ** 2, axis=(1, 2)))


def test_mixed_batch_concurrence_paths_agree():
    from entangle_mc.gates import cnot

    batch = s.sample_mixed_batch(gen(5), 200)
    np.testing.assert_allclose(batch.concurrence(), concurrence(batch.matrices()), atol=1e-12)
    np.testing.assert_allclose(batch.concurrence(cnot()), concurrence(batch.matrices(cnot())), atol=1e-12)


def test_pure_batch():
    batch = s.sample_pure_batch(gen(6), 40000)
    np.testing.assert_allclose(np.linalg.norm(batch.amplitudes, axis=1), 1.0)
    assert stats.kstest(np.abs(batch.amplitudes[:, 3]) ** 2, stats.beta(1, 3).cdf).pvalue > 0.001
    assert isinstance(batch.state(0), PureState)
    e = eof_from_concurrence(batch.concurrence())
    assert e.mean() == pytest.approx(1 / (3 * np.log(2)), abs=0.01)


def test_single_state_samplers():
    assert isinstance(s.sample_mixed(gen()), DensityMatrix)
    assert isinstance(s.sample_pure(gen()), PureState)
    with pytest.raises(ConfigError):
        s.sample_batch(gen(), "thermal", 3)


@pytest.mark.parametrize(
    "text, band",
    [
        ("E=0", s.Band.separable()),
        ("e = 0.0", s.Band.separable()),
        ("E in [0.1, 0.2]", s.Band("E", 0.1, 0.2)),
        ("R in [1.39,1.41]", s.Band("R", 1.39, 1.41)),
    ],
)
def test_parse_band(text, band):
    assert s.parse_band(text) == band
    assert s.parse_band(str(band)) == band


@pytest.mark.parametrize("text", ["E>0", "R in [2,1]", "X in [0,1]", "E in [0.1]"])
def test_parse_band_errors(text):
    with pytest.raises(ConfigError) as info:
        s.parse_band(text)
    assert info.value.key == "band"


def test_separable_conditioning():
    batch, attempts = s.sample_conditioned_batch(gen(8), "all", s.Band.separable(), 20000)
    assert len(batch) == 20000
    assert np.all(batch.concurrence() == 0.0)
    np.testing.assert_array_equal(batch.concurrence(), concurrence(batch.matrices()))
    # the separable volume of the product measure is about 0.632
    assert len(batch) / attempts == pytest.approx(0.632, abs=0.015)


def test_entanglement_band_conditioning():
    band = s.Band.around("E", 0.2, 0.005)
    batch, attempts = s.sample_conditioned_batch(gen(9), "all", band, 300)
    e = eof_from_concurrence(concurrence(batch.matrices()))
    assert np.all((e >= 0.195 - 1e-12) & (e <= 0.205 + 1e-12))
    assert attempts > 300


def test_participation_ratio_band():
    band = s.Band.around("R", 1.4, 0.01)
    batch, _ = s.sample_conditioned_batch(gen(10), "all", band, 2000)
    r = 1 / batch.purity()
    assert np.all((r >= 1.39) & (r <= 1.41))
    r_full = 1 / np.sum(np.abs(batch.matrices()) ** 2, axis=(1, 2))
    np.testing.assert_allclose(r_full, r, rtol=1e-12)


def test_spectral_prefilter_is_exact():
    band = s.Band.around("E", 0.3, 0.05)
    cand = s.sample_mixed_batch(gen(11), 20000)
    ok, conc = s._screen(band, cand, s._concurrence_floor(band))
    brute = band.accepts(cand.concurrence(), cand.purity())
    np.testing.assert_array_equal(ok, brute)
    np.testing.assert_allclose(conc[ok], cand.concurrence()[ok], atol=0)


def test_conditioned_sampling_is_deterministic():
    band = s.Band.around("E", 0.1, 0.01)
    a, na = s.sample_conditioned_batch(gen(12), "all", band, 50)
    b, nb = s.sample_conditioned_batch(gen(12), "all", band, 50)
    assert na == nb
    np.testing.assert_array_equal(a.weights, b.weights)


def test_budget_exceeded():
    with pytest.raises(RejectionBudgetExceeded):
        s.sample_conditioned_batch(gen(13), "all", s.Band.around("E", 0.9, 0.001), 5, max_attempts=1000)
    with pytest.raises(RejectionBudgetExceeded):
        s.sample_conditioned_batch(gen(13), "all", s.Band.around("R", 3.9, 0.001), 5, max_attempts=1000)


def test_pure_band():
    batch, _ = s.sample_conditioned_batch(gen(14), "pure", s.Band.around("E", 0.5, 0.01), 100)
    e = eof_from_concurrence(batch.concurrence())
    assert np.all(np.abs(e - 0.5) <= 0.01)


@given(st.integers(0, 2**32 - 1), st.integers(1, 200))
def test_property_attempt_count_bounds(seed, n):
    batch, attempts = s.sample_conditioned_batch(gen(seed), "all", s.Band.separable(), n)
    assert len(batch) == n
    assert n <= attempts
