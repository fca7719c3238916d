"""Shared helpers for antisymmetric multi-index bookkeeping."""

from __future__ import annotations


def merge_sign(left: tuple, right: tuple):
    """Sorted merge of two increasing tuples with shuffle sign.

    Returns (key, sign); sign is 0 when the tuples share an index.
    """
    if set(left) & set(right):
        return None, 0
    merged = left + right
    key = tuple(sorted(merged))
    inv = 0
    for i, a in enumerate(merged):
        for b in merged[i + 1:]:
            if a > b:
                inv += 1
    return key, -1 if inv % 2 else 1


def sorted_sign(idx: tuple):
    """Sort an arbitrary tuple, returning (key, sign); sign 0 on repeats."""
    if len(set(idx)) != len(idx):
        return None, 0
    key = tuple(sorted(idx))
    inv = 0
    for i, a in enumerate(idx):
        for b in idx[i + 1:]:
            if a > b:
                inv += 1
    return key, -1 if inv % 2 else 1


def permutation_sign(perm) -> int:
    inv = 0
    for i in range(len(perm)):
        for j in range(i + 1, len(perm)):
            if perm[i] > perm[j]:
                inv += 1
    return -1 if inv % 2 else 1
