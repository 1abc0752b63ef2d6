"""Small-dimensional Lie algebra helpers: so(3) <-> R^3, the so(4) split,
commutators and the invariant inner product <A, B> = -1/2 tr(AB).

Matrices are plain numpy arrays. Functions that take a single vector or
matrix also accept stacked inputs with leading batch axes, e.g. ``(k, 3)``
or ``(k, n, n)``.
"""
from __future__ import annotations

from functools import lru_cache

import numpy as np

from .errors import InvalidArgument

SKEW_PARSE_TOL = 1e-12


def cross0(a, b):
    """Cross product along axis 0 (``a.shape[0] == 3``), cheaper than ``np.cross`` for small batches."""
    return np.stack([a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]])


def matvec0(A, v):
    """``A @ v`` acting on axis 0 of ``v``, which may carry trailing batch axes."""
    v = np.asarray(v)
    if v.ndim <= 2:
        return A @ v
    return (A @ v.reshape(v.shape[0], -1)).reshape((A.shape[0],) + v.shape[1:])


def hat3(v):
    """Map a 3-vector to the skew matrix acting as ``v x .``."""
    v = np.asarray(v, dtype=float)
    if v.shape[-1] != 3:
        raise InvalidArgument(f"hat3 expects 3-vectors, got shape {v.shape}")
    a1, a2, a3 = v[..., 0], v[..., 1], v[..., 2]
    z = np.zeros_like(a1)
    return np.stack(
        [
            np.stack([z, -a3, a2], axis=-1),
            np.stack([a3, z, -a1], axis=-1),
            np.stack([-a2, a1, z], axis=-1),
        ],
        axis=-2,
    )


def check_skew(A, tol=SKEW_PARSE_TOL):
    """Return ``A`` as a float array, raising if it is not skew within ``tol``."""
    A = np.asarray(A, dtype=float)
    if A.ndim < 2 or A.shape[-1] != A.shape[-2]:
        raise InvalidArgument(f"expected square matrices, got shape {A.shape}")
    err = np.max(np.abs(A + np.swapaxes(A, -1, -2)), initial=0.0)
    if not err <= tol:
        raise InvalidArgument(f"matrix is not skew-symmetric (|A + A^T| = {err:.3g})")
    return A


def vee3(A, tol=SKEW_PARSE_TOL):
    """Inverse of :func:`hat3`."""
    A = check_skew(A, tol)
    if A.shape[-1] != 3:
        raise InvalidArgument("vee3 expects 3x3 matrices")
    return np.stack([A[..., 2, 1], A[..., 0, 2], A[..., 1, 0]], axis=-1)


def split4(A, tol=SKEW_PARSE_TOL):
    """so(4) -> R^3 x R^3.

    ``A_+`` is read from the upper-left 3x3 block as a hat matrix and ``A_-``
    from the last row; the pair returned is ``((A_+ + A_-)/2, (A_+ - A_-)/2)``.
    """
    A = check_skew(A, tol)
    if A.shape[-1] != 4:
        raise InvalidArgument("split4 expects 4x4 matrices")
    plus = np.stack([A[..., 2, 1], A[..., 0, 2], A[..., 1, 0]], axis=-1)
    minus = A[..., 3, :3]
    return (plus + minus) / 2.0, (plus - minus) / 2.0


def join4(first, second):
    """Inverse of :func:`split4`."""
    first = np.asarray(first, dtype=float)
    second = np.asarray(second, dtype=float)
    plus = first + second
    minus = first - second
    out = np.zeros(plus.shape[:-1] + (4, 4))
    out[..., :3, :3] = hat3(plus)
    out[..., 3, :3] = minus
    out[..., :3, 3] = -minus
    return out


def commutator(A, B):
    A = np.asarray(A)
    B = np.asarray(B)
    if A.shape[-2:] != B.shape[-2:]:
        raise InvalidArgument(f"dimension mismatch: {A.shape} vs {B.shape}")
    return A @ B - B @ A


def inner(A, B):
    """Invariant inner product -1/2 tr(AB) on so(n)."""
    A = np.asarray(A)
    B = np.asarray(B)
    if A.shape[-2:] != B.shape[-2:]:
        raise InvalidArgument(f"dimension mismatch: {A.shape} vs {B.shape}")
    # tr(AB) = sum_ij A_ij B_ji
    return -0.5 * np.einsum("...ij,...ji->...", A, B)


@lru_cache(maxsize=None)
def upper_indices(n):
    """Row-major strict upper-triangle index pairs of an ``n x n`` matrix."""
    iu = np.triu_indices(n, 1)
    return tuple(zip(iu[0].tolist(), iu[1].tolist()))


def skew_dim(n):
    return n * (n - 1) // 2


def skew_order(m):
    """Matrix size ``n`` for ``m = n(n-1)/2`` upper-triangle entries."""
    n = int(round((1 + np.sqrt(1 + 8 * m)) / 2))
    if skew_dim(n) != m:
        raise InvalidArgument(f"{m} is not a triangular number")
    return n


def upper_to_skew(v, n=None):
    """Rebuild skew matrices from upper-triangle entries.

    ``v`` has the entries on its first axis, shape ``(m, *batch)``; the result
    has shape ``(*batch, n, n)``.
    """
    v = np.asarray(v)
    if n is None:
        n = skew_order(v.shape[0])
    iu = np.triu_indices(n, 1)
    vb = np.moveaxis(v, 0, -1)
    out = np.zeros(vb.shape[:-1] + (n, n), dtype=v.dtype)
    out[..., iu[0], iu[1]] = vb
    out[..., iu[1], iu[0]] = -vb
    return out


def skew_to_upper(A):
    """Inverse of :func:`upper_to_skew`; returns shape ``(m, *batch)``."""
    A = np.asarray(A)
    n = A.shape[-1]
    iu = np.triu_indices(n, 1)
    return np.moveaxis(A[..., iu[0], iu[1]], -1, 0)
