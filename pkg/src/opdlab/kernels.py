"""Backend selection for the hot loops.

The compiled extension is used when importable; ``OPDLAB_PURE_PYTHON=1`` forces
the numpy fallback.  Both expose identical functions.
"""

from __future__ import annotations

import os

import numpy as np

from . import _kernels_py
from ._kernels_py import pack_rows, unpack_rows

if os.environ.get("OPDLAB_PURE_PYTHON", "") not in ("", "0"):
    _impl = _kernels_py
else:
    try:
        from . import _kernels_c as _impl
    except ImportError:  # extension not built
        _impl = _kernels_py

BACKEND: str = _impl.BACKEND


def available_backends() -> dict:
    out = {"python": _kernels_py}
    try:
        from . import _kernels_c

        out["cython"] = _kernels_c
    except ImportError:
        pass
    return out


def translate_images(vals, add, nwords: int) -> np.ndarray:
    return _impl.translate_images(
        np.ascontiguousarray(vals, dtype=np.int64), np.ascontiguousarray(add, dtype=np.int32), int(nwords)
    )


def tsubset_counts(bits, v: int, t: int) -> np.ndarray:
    return _impl.tsubset_counts(np.ascontiguousarray(bits, dtype=np.uint64), int(v), int(t))


def intersection_profile(bits, kmax: int) -> np.ndarray:
    return _impl.intersection_profile(np.ascontiguousarray(bits, dtype=np.uint64), int(kmax))


def count_supersets(bits, masks) -> np.ndarray:
    return _impl.count_supersets(
        np.ascontiguousarray(bits, dtype=np.uint64), np.ascontiguousarray(masks, dtype=np.uint64)
    )


def permute_points(bits, perm) -> np.ndarray:
    return _impl.permute_points(
        np.ascontiguousarray(bits, dtype=np.uint64), np.ascontiguousarray(perm, dtype=np.int64)
    )


def fwht(a) -> np.ndarray:
    return _impl.fwht(np.ascontiguousarray(a, dtype=np.int64))


def popcount_rows(bits) -> np.ndarray:
    return np.bitwise_count(np.asarray(bits, dtype=np.uint64)).sum(axis=-1, dtype=np.int64)


__all__ = [
    "BACKEND",
    "available_backends",
    "count_supersets",
    "fwht",
    "intersection_profile",
    "pack_rows",
    "permute_points",
    "popcount_rows",
    "translate_images",
    "tsubset_counts",
    "unpack_rows",
]
