"""Deterministic RNG derivation.

Every run owns a single root seed; components derive their own generators by
name, so adding or removing one consumer never shifts another's stream.
"""

from __future__ import annotations

import hashlib

import numpy as np


def derive_entropy(root: int, *names: object) -> list[int]:
    """Hash a root seed and a name path into SeedSequence entropy words."""
    h = hashlib.sha256()
    h.update(str(int(root)).encode("utf-8"))
    for name in names:
        h.update(b"/")
        h.update(str(name).encode("utf-8"))
    digest = h.digest()
    return [int.from_bytes(digest[i : i + 4], "little") for i in range(0, 32, 4)]


def derive_rng(root: int, *names: object) -> np.random.Generator:
    """Generator seeded from ``root`` and a stable name path."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(derive_entropy(root, *names))))
