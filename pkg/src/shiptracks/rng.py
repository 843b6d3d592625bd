"""Counter-based random streams keyed by (seed, frame, mechanism, subject id).

Every draw in a simulation is a pure function of its key, so per-packet
draws do not depend on evaluation order and may be computed in any
partition. The block function is Philox4x32-10 (Salmon et al., SC'11),
vectorized over numpy arrays.
"""

from __future__ import annotations

import enum

import numpy as np

_MUL0 = np.uint64(0xD2511F53)
_MUL1 = np.uint64(0xCD9E8D57)
_WEYL0 = np.uint64(0x9E3779B9)
_WEYL1 = np.uint64(0xBB67AE85)
_MASK32 = np.uint64(0xFFFFFFFF)
_SHIFT32 = np.uint64(32)


class Tag(enum.IntEnum):
    """Mechanism tags; each gets a disjoint family of substreams."""

    MOTION = 1
    SPAWN = 2
    BIRTH = 3
    OBSERVE = 4


def philox4x32(counter, key, rounds: int = 10) -> np.ndarray:
    """Philox4x32 block function.

    ``counter`` has shape ``(..., 4)`` and ``key`` shape ``(2,)``, both
    holding 32-bit words. Returns an array of the counter's shape with
    dtype uint32.
    """
    ctr = np.asarray(counter, dtype=np.uint64) & _MASK32
    c0, c1, c2, c3 = (ctr[..., i] for i in range(4))
    k0 = np.uint64(int(key[0]) & 0xFFFFFFFF)
    k1 = np.uint64(int(key[1]) & 0xFFFFFFFF)
    for _ in range(rounds):
        p0 = _MUL0 * c0
        p1 = _MUL1 * c2
        c0, c1, c2, c3 = (
            (p1 >> _SHIFT32) ^ c1 ^ k0,
            p1 & _MASK32,
            (p0 >> _SHIFT32) ^ c3 ^ k1,
            p0 & _MASK32,
        )
        k0 = (k0 + _WEYL0) & _MASK32
        k1 = (k1 + _WEYL1) & _MASK32
    return np.stack([c0, c1, c2, c3], axis=-1).astype(np.uint32)


def _words_to_unit(hi, lo) -> np.ndarray:
    # 53-bit uniform on the open interval (0, 1)
    a = (hi >> np.uint32(5)).astype(np.float64)
    b = (lo >> np.uint32(6)).astype(np.float64)
    return (a * 67108864.0 + b + 0.5) / 9007199254740992.0


class CounterRng:
    """Keyed random streams derived from one 64-bit master seed.

    A substream is addressed by ``(frame, tag, subject_id)``; block ``j``
    of that substream is ``philox(counter=(j, id, frame, tag), key=seed)``.
    Subject ids and frames must fit in 32 bits.
    """

    def __init__(self, seed: int):
        seed = int(seed)
        if not 0 <= seed < 2**64:
            raise ValueError(f"seed must be an unsigned 64-bit integer, got {seed}")
        self.seed = seed
        self._key = (seed & 0xFFFFFFFF, seed >> 32)

    def _blocks(self, frame: int, tag: int, ids, n_blocks: int, start: int = 0) -> np.ndarray:
        ids = np.asarray(ids, dtype=np.uint64).reshape(-1)
        if ids.size and int(ids.max()) >= 2**32:
            raise ValueError("subject ids must fit in 32 bits")
        ctr = np.empty((ids.size, n_blocks, 4), dtype=np.uint64)
        ctr[..., 0] = np.arange(start, start + n_blocks, dtype=np.uint64)[None, :]
        ctr[..., 1] = ids[:, None]
        ctr[..., 2] = np.uint64(frame)
        ctr[..., 3] = np.uint64(int(tag))
        return philox4x32(ctr, self._key)

    def uniform(self, frame: int, tag: int, ids, k: int, start_block: int = 0) -> np.ndarray:
        """``k`` uniforms in (0, 1) per id; shape ``(len(ids), k)``.

        Each block yields two uniforms; draws for one id that must not
        overlap use distinct ``start_block`` ranges.
        """
        n_blocks = (k + 1) // 2
        w = self._blocks(frame, tag, ids, n_blocks, start_block)
        u = np.empty(w.shape[:2] + (2,))
        u[..., 0] = _words_to_unit(w[..., 0], w[..., 1])
        u[..., 1] = _words_to_unit(w[..., 2], w[..., 3])
        return u.reshape(w.shape[0], 2 * n_blocks)[:, :k]

    def normal(self, frame: int, tag: int, ids, k: int, start_block: int = 0) -> np.ndarray:
        """``k`` standard normals per id via Box-Muller; shape ``(len(ids), k)``."""
        m = (k + 1) // 2
        u = self.uniform(frame, tag, ids, 2 * m, start_block).reshape(-1, m, 2)
        r = np.sqrt(-2.0 * np.log(u[..., 0]))
        theta = 2.0 * np.pi * u[..., 1]
        z = np.stack([r * np.cos(theta), r * np.sin(theta)], axis=-1)
        return z.reshape(u.shape[0], 2 * m)[:, :k]

    def generator(self, frame: int, tag: int, subject_id: int) -> np.random.Generator:
        """A numpy Generator seeded from one substream.

        Used for draws whose count is not known in advance (Poisson
        counts and the packets they place).
        """
        w = self._blocks(frame, tag, [subject_id], 1)[0, 0].astype(np.uint64)
        key = [int(w[0]) << 32 | int(w[1]), int(w[2]) << 32 | int(w[3])]
        return np.random.Generator(np.random.Philox(key=key))


def stream_id(frame: int, tag: Tag, subject_id: int) -> list:
    return [int(frame), Tag(tag).name.lower(), int(subject_id)]
