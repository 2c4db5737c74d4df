"""Counter-based per-photon random streams for reproducible ensembles.

Photon i always reads the four 64-bit words of Philox counter block i + 1 under
the run's key, so a photon's draws do not depend on how the ensemble is
sharded or in which order shards run.
"""

from __future__ import annotations

import numpy as np

WORDS_PER_PHOTON = 4
_MANTISSA = np.float64(2.0**-53)


class PhotonStreams:
    """Seeded source of per-photon uniforms in [0, 1)."""

    def __init__(self, seed: int):
        if seed < 0:
            raise ValueError(f"seed must be non-negative, got {seed}")
        self._seed = int(seed)

    @property
    def seed(self) -> int:
        return self._seed

    def uniforms(self, start: int, count: int) -> np.ndarray:
        """Array of shape (count, 4): one row of uniforms per photon index."""
        bits = np.random.Philox(key=self._seed, counter=start)
        raw = bits.random_raw(count * WORDS_PER_PHOTON)
        return ((raw >> np.uint64(11)).astype(np.float64) * _MANTISSA).reshape(
            count, WORDS_PER_PHOTON
        )


def shard_bounds(total: int, shards: int) -> list[tuple[int, int]]:
    """Split [0, total) into `shards` contiguous ranges."""
    shards = max(1, min(shards, total))
    edges = np.linspace(0, total, shards + 1).astype(int)
    return [(int(a), int(b)) for a, b in zip(edges[:-1], edges[1:])]
