"""Operating characteristics of the Monte Carlo power estimate."""
import pytest

from briefmix.power import BadParams, simulate_power


def test_power_band_at_target_design():
    power = simulate_power(100, 0.15, 0.20, 400, seed=2026)
    assert 0.75 <= power <= 0.95


def test_null_size_near_alpha():
    size = simulate_power(100, 0.0, 0.20, 600, seed=2027)
    assert 0.02 <= size <= 0.09


def test_more_participants_more_power():
    small = simulate_power(10, 0.15, 0.20, 300, seed=5)
    big = simulate_power(100, 0.15, 0.20, 300, seed=5)
    assert small < big


def test_deterministic_in_seed():
    a = simulate_power(40, 0.10, 0.20, 50, seed=9)
    b = simulate_power(40, 0.10, 0.20, 50, seed=9)
    assert a == b


@pytest.mark.parametrize("kwargs", [
    dict(n_participants=2),
    dict(n_sims=0),
    dict(obs_per_participant=0),
    dict(base_rate=1.5),
    dict(effect=2.0),
    dict(sd=-0.1),
    dict(alpha=0.0),
])
def test_bad_params_rejected(kwargs):
    args = dict(n_participants=50, effect=0.1, sd=0.2, n_sims=10, seed=1)
    args.update(kwargs)
    with pytest.raises(BadParams):
        simulate_power(**args)
