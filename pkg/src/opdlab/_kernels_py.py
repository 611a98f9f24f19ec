"""Numpy implementations of the hot loops (fallback for ``_kernels_c``)."""

from __future__ import annotations

from itertools import combinations
from math import comb

import numpy as np

BACKEND = "python"

_CHUNK = 1 << 22


def pack_rows(mask: np.ndarray, nwords: int) -> np.ndarray:
    """Boolean matrix (rows x v) to little-endian uint64 words."""
    rows, v = mask.shape
    padded = np.zeros((rows, nwords * 64), dtype=bool)
    padded[:, :v] = mask
    packed = np.packbits(padded, axis=1, bitorder="little")
    return np.ascontiguousarray(packed).view("<u8").astype(np.uint64, copy=False).reshape(rows, nwords)


def unpack_rows(bits: np.ndarray, v: int) -> np.ndarray:
    b = np.ascontiguousarray(bits, dtype="<u8").view(np.uint8)
    return np.unpackbits(b, axis=1, bitorder="little")[:, :v].astype(bool)


def translate_images(vals, add, nwords):
    vals = np.asarray(vals, dtype=np.int64)
    add = np.asarray(add)
    r, q = vals.shape
    out = np.zeros((r * q, nwords), dtype=np.uint64)
    step = max(1, _CHUNK // (q * q))
    rows_c = np.arange(q)
    for lo in range(0, r, step):
        hi = min(r, lo + step)
        y = add[vals[lo:hi, None, :], rows_c[None, :, None]]  # (n, c, x)
        n = hi - lo
        mask = np.zeros((n * q, q), dtype=bool)
        flat = y.reshape(n * q, q)
        mask[np.arange(n * q)[:, None], flat] = True
        out[lo * q : hi * q] = pack_rows(mask, nwords)
    return out


def tsubset_counts(bits, v, t):
    bits = np.asarray(bits, dtype=np.uint64)
    counts = np.zeros(comb(v, t), dtype=np.int64)
    if len(bits) == 0:
        return counts
    member = unpack_rows(bits, v)
    sizes = member.sum(axis=1)
    binom = np.array([[comb(n, j) for j in range(t + 1)] for n in range(v + 1)], dtype=np.int64)
    for k in np.unique(sizes):
        if k < t:
            continue
        rows = member[sizes == k]
        pts = np.nonzero(rows)[1].reshape(len(rows), k)  # sorted per row
        pos = np.array(list(combinations(range(k), t)), dtype=np.int64)
        step = max(1, _CHUNK // len(pos))
        for lo in range(0, len(pts), step):
            chunk = pts[lo : lo + step]
            ranks = np.zeros((len(chunk), len(pos)), dtype=np.int64)
            for j in range(t):
                ranks += binom[chunk[:, pos[:, j]], j + 1]
            counts += np.bincount(ranks.ravel(), minlength=len(counts))
    return counts


def _popcount_rows(x):
    return np.bitwise_count(x).sum(axis=-1, dtype=np.int64)


def intersection_profile(bits, kmax):
    bits = np.asarray(bits, dtype=np.uint64)
    nb = len(bits)
    prof = np.zeros((nb, kmax + 1), dtype=np.int64)
    step = max(1, _CHUNK // max(1, nb * bits.shape[1]))
    idx = np.arange(nb)
    for lo in range(0, nb, step):
        hi = min(nb, lo + step)
        inter = _popcount_rows(bits[lo:hi, None, :] & bits[None, :, :])  # (n, nb)
        inter[np.arange(hi - lo), idx[lo:hi]] = -1  # drop the diagonal
        for s in range(kmax + 1):
            prof[lo:hi, s] = (inter == s).sum(axis=1)
    return prof


def count_supersets(bits, masks):
    bits = np.asarray(bits, dtype=np.uint64)
    masks = np.asarray(masks, dtype=np.uint64)
    out = np.zeros(len(masks), dtype=np.int64)
    step = max(1, _CHUNK // max(1, len(bits) * bits.shape[1]))
    for lo in range(0, len(masks), step):
        m = masks[lo : lo + step]
        hit = ((bits[None, :, :] & m[:, None, :]) == m[:, None, :]).all(axis=2)
        out[lo : lo + step] = hit.sum(axis=1)
    return out


def fwht(a):
    x = np.array(a, dtype=np.int64, copy=True)
    n = len(x)
    if n & (n - 1):
        raise ValueError("length must be a power of two")
    h = 1
    while h < n:
        y = x.reshape(-1, 2, h)
        u, w = y[:, 0, :].copy(), y[:, 1, :].copy()
        y[:, 0, :] = u + w
        y[:, 1, :] = u - w
        h *= 2
    return x


def permute_points(bits, perm):
    bits = np.asarray(bits, dtype=np.uint64)
    perm = np.asarray(perm, dtype=np.int64)
    v = len(perm)
    inv = np.empty_like(perm)
    inv[perm] = np.arange(v)
    out = np.empty_like(bits)
    step = max(1, _CHUNK // max(1, v))
    for lo in range(0, len(bits), step):
        member = unpack_rows(bits[lo : lo + step], v)
        out[lo : lo + step] = pack_rows(np.take(member, inv, axis=1), bits.shape[1])
    return out
