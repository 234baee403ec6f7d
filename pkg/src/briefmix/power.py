"""Monte Carlo power analysis for the experiment's primary contrast.

Each simulated participant carries a latent baseline recognition rate;
treatment shifts that rate additively. Participants contribute several
binary observations each, and the test is a likelihood-ratio test on a
logistic model with the latent baseline as a covariate. Conditioning on
the baseline absorbs the between-participant clustering, so the test
holds its nominal size without a mixed model.
"""
from __future__ import annotations

import numpy as np

from .seeding import substream
from .stats import pairwise_test

__all__ = ["BadParams", "simulate_power"]


class BadParams(ValueError):
    """Power-simulation parameters outside their valid ranges."""


def simulate_power(n_participants: int, effect: float, sd: float,
                   n_sims: int, seed: int, *, base_rate: float = 0.5,
                   obs_per_participant: int = 5,
                   alpha: float = 0.05) -> float:
    """Estimate the probability of detecting `effect` at level `alpha`.

    Half the participants are treated; `sd` is the spread of the latent
    per-participant baseline around `base_rate`. Returns the fraction of
    simulations whose likelihood-ratio p-value falls below `alpha`.
    With effect 0 this estimates the false-positive rate instead.
    """
    if n_participants < 4:
        raise BadParams("need at least 4 participants")
    if n_sims < 1:
        raise BadParams("need at least one simulation")
    if obs_per_participant < 1:
        raise BadParams("need at least one observation per participant")
    if not (0.0 <= base_rate <= 1.0):
        raise BadParams(f"base_rate {base_rate} outside [0, 1]")
    if not (-1.0 <= effect <= 1.0):
        raise BadParams(f"effect {effect} outside [-1, 1]")
    if sd < 0:
        raise BadParams("sd must be nonnegative")
    if not (0.0 < alpha < 1.0):
        raise BadParams(f"alpha {alpha} outside (0, 1)")

    rng = substream(seed, "power")
    n_treat = n_participants // 2
    k = obs_per_participant

    rejections = 0
    for _ in range(n_sims):
        baseline = np.clip(rng.normal(base_rate, sd, n_participants), 0.0, 1.0)
        p = baseline.copy()
        p[:n_treat] = np.clip(p[:n_treat] + effect, 0.0, 1.0)
        y = (rng.random((n_participants, k)) < p[:, None]).astype(float)
        # the model is logistic, so hand it the baseline on the logit scale;
        # under the null that makes the fitted mean exactly right and the
        # test holds its nominal size despite repeated measures
        b = np.clip(baseline, 0.02, 0.98)
        base_logit = np.repeat(np.log(b / (1.0 - b)), k)
        p_value = pairwise_test(
            y[:n_treat].reshape(-1), y[n_treat:].reshape(-1),
            base_a=base_logit[:n_treat * k], base_b=base_logit[n_treat * k:])
        if p_value < alpha:
            rejections += 1
    return rejections / n_sims
