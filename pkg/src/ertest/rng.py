"""Deterministic seed derivation for split random streams.

A master seed plus a path of labels hashes to a child seed, so per-trial
streams are independent of trial execution order and safe to run in parallel.
"""
from __future__ import annotations

import hashlib
import random


def derive_seed(master: int, *path) -> int:
    text = str(int(master)) + "".join(f"/{p}" for p in path)
    digest = hashlib.sha256(text.encode("ascii")).digest()
    return int.from_bytes(digest[:8], "big")


def make_rng(master: int, *path) -> random.Random:
    if path:
        return random.Random(derive_seed(master, *path))
    return random.Random(int(master))
