"""Deterministic RNG substreams.

Every randomized step derives its generator from one root seed plus a list
of scope strings (for example the employee and draft ids). The derivation
hashes the scope, so streams never depend on iteration order and reruns
with the same root seed are byte-identical.
"""
from __future__ import annotations

import hashlib

import numpy as np

__all__ = ["substream"]


def _scope_key(name: str) -> int:
    return int.from_bytes(hashlib.sha256(name.encode("utf-8")).digest()[:8],
                          "big")


def substream(root_seed: int, *scope: str) -> np.random.Generator:
    """Generator for (root_seed, scope...); stable across runs and platforms."""
    if root_seed < 0:
        raise ValueError("seed must be non-negative")
    entropy = [int(root_seed)] + [_scope_key(s) for s in scope]
    return np.random.default_rng(np.random.SeedSequence(entropy))
