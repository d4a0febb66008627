"""Deterministic seed derivation.

Every stage of the pipeline draws its randomness from a sub-seed derived
from one master seed and a stage tag, so that changing or reordering one
stage never perturbs another.
"""

from __future__ import annotations

import hashlib

__all__ = ["derive_seed"]


def derive_seed(master: int, tag: str) -> int:
    """Derive a 64-bit sub-seed from a master seed and a textual tag."""
    digest = hashlib.blake2b(f"{master}:{tag}".encode(), digest_size=8).digest()
    return int.from_bytes(digest, "big")
