"""Deterministic sampling of root tuples inside the stability polydisk."""

from __future__ import annotations

import numpy as np


def sample_disk(rng: np.random.Generator, count: int, radius: float) -> np.ndarray:
    """count points uniform in area over the disk of the given radius."""
    r = radius * np.sqrt(rng.random(count))
    theta = 2.0 * np.pi * rng.random(count)
    return r * np.exp(1j * theta)


def sample_root_tuples(
    seed_or_rng,
    samples: int,
    n: int,
    radius: float,
    min_separation: float = 0.0,
    max_rejections: int = 100_000,
) -> np.ndarray:
    """(samples, n) complex array of root tuples, pairwise separated.

    Tuples whose minimum pairwise distance falls below ``min_separation``
    are rejected and redrawn, so the output is deterministic for a fixed
    seed but the rejection count is data dependent.
    """
    rng = (
        seed_or_rng
        if isinstance(seed_or_rng, np.random.Generator)
        else np.random.default_rng(seed_or_rng)
    )
    out = np.empty((samples, n), dtype=complex)
    filled = 0
    rejections = 0
    while filled < samples:
        cand = sample_disk(rng, n, radius)
        if n > 1 and min_separation > 0.0:
            dist = np.abs(cand[:, None] - cand[None, :])
            np.fill_diagonal(dist, np.inf)
            if dist.min() < min_separation:
                rejections += 1
                if rejections > max_rejections:
                    raise RuntimeError(
                        "rejection sampling failed; separation too large for the disk"
                    )
                continue
        out[filled] = cand
        filled += 1
    return out
