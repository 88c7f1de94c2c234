"""
Counter-based random streams

Every stream is a Philox generator keyed by a SeedSequence whose spawn key
is the path (stream_id, *sub_ids). Two streams with the same
(master_seed, path) produce the same numbers in any process, in any order.
"""
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtri

MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class RngStream:
    master_seed: int
    stream_id: int
    sub_ids: tuple = ()

    def __post_init__(self):
        if not 0 <= self.master_seed <= MASK64:
            raise ValueError(f"master_seed must fit in 64 bits, got {self.master_seed}")
        if not 0 <= self.stream_id <= MASK64:
            raise ValueError(f"stream_id must fit in 64 bits, got {self.stream_id}")

    @property
    def spawn_key(self):
        return (self.stream_id, *self.sub_ids)

    def generator(self):
        """Fresh numpy Generator positioned at the start of this stream"""
        seq = np.random.SeedSequence(entropy=self.master_seed, spawn_key=self.spawn_key)
        return np.random.Generator(np.random.Philox(seq))

    def child(self, sub_id):
        """Independent sub-stream, e.g. for retries or composite draws"""
        return RngStream(self.master_seed, self.stream_id, (*self.sub_ids, int(sub_id)))


def derive_seed(*path):
    """
    Hash an integer path (study seed, cell index, sim index, ...) into a 64-bit seed.

    Args:
        *path: Non-negative integers

    Returns:
        Integer in [0, 2**64)
    """
    seq = np.random.SeedSequence(entropy=[int(p) for p in path])
    return int(seq.generate_state(1, dtype=np.uint64)[0])


_TWO_53 = float(2 ** 53)


def open_uniform(gen, size):
    """Uniforms strictly inside (0, 1): (k + 1/2) / 2^53 for 53-bit integers k"""
    return (gen.integers(0, 2 ** 53, size=size).astype(float) + 0.5) / _TWO_53


def normal_draws(gen, size):
    """Standard normals by inverse CDF of open uniforms"""
    return ndtri(open_uniform(gen, size))
