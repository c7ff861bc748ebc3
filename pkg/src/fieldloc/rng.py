"""Seeded random streams with named substream derivation.

Every source of randomness in the package flows from one 64-bit scenario
seed through :class:`RngStream`. A substream is derived from the root
entropy plus a label path, never from the parent's draw position, so two
substreams with different labels are independent and a substream's values
do not depend on how much the parent (or any sibling) has been consumed.
This is what makes parallel generation schedules reproducible.
"""

from __future__ import annotations

import hashlib

import numpy as np

MAX_SEED = 2**64 - 1


def _label_words(label) -> tuple[int, ...]:
    """Map a label to two deterministic 32-bit words via SHA-256."""
    if not isinstance(label, (str, int)):
        raise TypeError(f"substream labels must be str or int, got {type(label).__name__}")
    digest = hashlib.sha256(f"{type(label).__name__}:{label}".encode()).digest()
    return (
        int.from_bytes(digest[0:4], "little"),
        int.from_bytes(digest[4:8], "little"),
    )


class RngStream:
    """A deterministic random stream addressable by (seed, label path)."""

    def __init__(self, seed_seq: np.random.SeedSequence):
        self._seq = seed_seq
        self._gen: np.random.Generator | None = None

    @classmethod
    def from_seed(cls, seed: int) -> "RngStream":
        seed = int(seed)
        if not 0 <= seed <= MAX_SEED:
            raise ValueError(f"seed must be an unsigned 64-bit integer, got {seed}")
        return cls(np.random.SeedSequence(seed))

    def substream(self, *labels) -> "RngStream":
        """Derive an independent child stream named by `labels`.

        Derivation is a pure function of the root seed and the label path;
        it does not consume or depend on this stream's draw state.
        """
        if not labels:
            raise ValueError("substream requires at least one label")
        words: list[int] = []
        for label in labels:
            words.extend(_label_words(label))
        child = np.random.SeedSequence(
            entropy=self._seq.entropy,
            spawn_key=tuple(self._seq.spawn_key) + tuple(words),
        )
        return RngStream(child)

    @property
    def generator(self) -> np.random.Generator:
        """The stream's numpy generator (created lazily, then stateful)."""
        if self._gen is None:
            self._gen = np.random.default_rng(self._seq)
        return self._gen

    def __repr__(self) -> str:
        return f"RngStream(entropy={self._seq.entropy}, path={self._seq.spawn_key})"
