import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ofdm_sync.channel import (ChannelModel, NoiseConvention, NoiseSpec, add_awgn,
                               apply_multipath, derive_seed, synthesize_scenario)
from ofdm_sync.frame import OfdmConfig, assemble_burst


def fir_oracle(x, taps):
    """Loop-level evaluation of out_n = sum_m h_m x_{n-d_m}."""
    out = [0j] * len(x)
    for n in range(len(x)):
        for d, h in taps:
            if n - d >= 0:
                out[n] += h * x[n - d]
    return np.array(out)


def test_single_unit_tap_delays_by_one(rng):
    x = rng.standard_normal(50) + 1j * rng.standard_normal(50)
    y = apply_multipath(x, ChannelModel(((1, 1 + 0j),)))
    assert y[0] == 0 and np.array_equal(y[1:], x[:-1])


def test_two_ray_impulse_response():
    ch = ChannelModel.two_ray(128)
    assert ch.duration == 33
    x = np.zeros(64, complex)
    x[0] = 1
    y = apply_multipath(x, ch)
    expected = np.zeros(64, complex)
    expected[1] = 0.8
    expected[33] = 0.5 * np.exp(1j * np.pi / 4)
    np.testing.assert_allclose(y, expected, rtol=0, atol=1e-15)


def test_multipath_matches_loop_oracle(rng):
    taps = ((2, 0.3 - 0.1j), (5, -1.2 + 0.4j), (9, 0.05j))
    x = rng.standard_normal(40) + 1j * rng.standard_normal(40)
    np.testing.assert_allclose(apply_multipath(x, ChannelModel(taps)), fir_oracle(x, taps),
                               rtol=0, atol=1e-13)


def test_multipath_linearity(rng):
    ch = ChannelModel.two_ray()
    x, y = (rng.standard_normal(300) + 1j * rng.standard_normal(300) for _ in range(2))
    a, b = 0.7 - 2j, -1.1 + 0.3j
    lhs = apply_multipath(a * x + b * y, ch)
    rhs = a * apply_multipath(x, ch) + b * apply_multipath(y, ch)
    np.testing.assert_allclose(lhs, rhs, rtol=0, atol=1e-12)


@settings(max_examples=30, deadline=None)
@given(shift=st.integers(0, 40), seed=st.integers(0, 1000))
def test_multipath_time_invariance(shift, seed):
    r = np.random.default_rng(seed)
    ch = ChannelModel.two_ray(32)
    x = r.standard_normal(100) + 0j
    shifted = np.concatenate([np.zeros(shift), x])
    y = apply_multipath(x, ch)
    ys = apply_multipath(shifted, ch)
    np.testing.assert_allclose(ys[shift:], y, rtol=0, atol=1e-14)


@pytest.mark.parametrize("taps", [(), ((0, 1.0),), ((3, 1.0), (2, 1.0)), ((2, 1.0), (2, 0.5))])
def test_bad_taps_rejected(taps):
    with pytest.raises(ValueError):
        ChannelModel(taps)


def test_tap_text_round_trip():
    ch = ChannelModel.two_ray()
    assert ChannelModel.parse(ch.format()) == ch
    assert ChannelModel.parse("1:0.8,0;33:0.25,0.5").taps == ((1, 0.8 + 0j), (33, 0.25 + 0.5j))
    with pytest.raises(ValueError):
        ChannelModel.parse("1:0.8")


def test_awgn_zero_variance_is_identity(rng):
    x = rng.standard_normal(100) + 1j * rng.standard_normal(100)
    assert np.array_equal(add_awgn(x, 0.0, 1), x)
    assert np.array_equal(add_awgn(x, NoiseSpec.noiseless(), 1), x)


def test_awgn_variance():
    w = add_awgn(np.zeros(100_000), 0.1, 42)
    power = np.mean(np.abs(w) ** 2)
    assert 0.097 <= power <= 0.103
    # split evenly between quadratures
    assert abs(np.var(w.real) - np.var(w.imag)) < 0.003


def test_awgn_deterministic():
    assert np.array_equal(add_awgn(np.zeros(1000), 0.3, 7), add_awgn(np.zeros(1000), 0.3, 7))
    assert not np.array_equal(add_awgn(np.zeros(1000), 0.3, 7), add_awgn(np.zeros(1000), 0.3, 8))


def test_awgn_white():
    sigma_sq = 0.2
    w = add_awgn(np.zeros(100_000), sigma_sq, 5)
    lag1 = np.mean(np.conj(w[:-1]) * w[1:])
    assert abs(lag1) < 0.01 * sigma_sq


def test_awgn_negative_variance():
    with pytest.raises(ValueError):
        add_awgn(np.zeros(4), -1.0, 0)


def test_noise_conventions():
    assert NoiseSpec(10, NoiseConvention.EB_N0_QPSK).sigma_sq == pytest.approx(0.05, rel=1e-15)
    assert NoiseSpec(7, NoiseConvention.ES_N0).sigma_sq == pytest.approx(0.19952623, rel=1e-8)
    assert NoiseSpec.from_config(OfdmConfig()).sigma_sq == pytest.approx(0.05)
    assert NoiseSpec.from_config(OfdmConfig(es_over_n0_db=7)).convention is NoiseConvention.ES_N0


def test_synthesize_identity_pipeline(cfg):
    from ofdm_sync.frame import seed_sequence
    b = synthesize_scenario(cfg, None, NoiseSpec.noiseless(), 11)
    burst_seed, _ = seed_sequence(11).spawn(2)
    assert np.array_equal(b.stream, assemble_burst(cfg, burst_seed).stream)


def test_synthesize_deterministic(cfg):
    ch, noise = ChannelModel.two_ray(), NoiseSpec(10)
    a = synthesize_scenario(cfg, ch, noise, 3)
    b = synthesize_scenario(cfg, ch, noise, 3)
    c = synthesize_scenario(cfg, ch, noise, 4)
    assert np.array_equal(a.stream, b.stream)
    assert not np.array_equal(a.stream, c.stream)
    assert a.expected_peak_index == cfg.expected_peak_index


def test_noise_covers_lead_and_tail(cfg):
    b = synthesize_scenario(cfg, None, NoiseSpec(10), 1)
    assert np.all(b.stream[:cfg.lead_noise_len] != 0)
    assert np.all(b.stream[-cfg.tail_noise_len:] != 0)


def test_derive_seed_stable_and_distinct():
    seeds = [derive_seed(5, i) for i in range(100)]
    assert len(set(seeds)) == 100
    assert seeds == [derive_seed(5, i) for i in range(100)]
    assert derive_seed(5, 0) != derive_seed(6, 0)
