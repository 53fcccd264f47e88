"""Deterministic random-number plumbing shared by every stage."""

from __future__ import annotations

import hashlib

import numpy as np


def seeded_rng(seed: int) -> np.random.Generator:
    """Return a PCG64 generator for ``seed``.

    PCG64 has a fixed, platform-independent output stream, so the same seed
    reproduces the same draws bit-for-bit on any machine. All randomness in
    the library flows through generators created here; there is no global
    mutable RNG state.
    """
    return np.random.Generator(np.random.PCG64(int(seed)))


def derive_seed(seed: int, *labels: str) -> int:
    """Derive a stage-specific 63-bit seed from a master seed and labels.

    Hash-based so that adding a stage never shifts the seeds of others.
    """
    text = str(int(seed)) + "/" + "/".join(labels)
    digest = hashlib.sha256(text.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big") >> 1
