"""
Dense matrix utilities: Kronecker products and powers, spectral radius,
Neumann-type solves and ordered products.

Matrices are plain 2-D float64 ndarrays.  The operator norm used throughout is
the max absolute row sum.
"""

from __future__ import annotations

import math
import warnings

import numpy as np

from pgarch.errors import (
    ConvergenceWarning,
    ShapeMismatch,
    SingularSystem,
    SizeOverflow,
    SpectralRadiusAtLeastOne,
)

__all__ = [
    "DIMENSION_CAP",
    "opnorm",
    "kron",
    "kron_power",
    "spectral_radius",
    "solve_neumann",
    "product_seq",
]

DIMENSION_CAP = 4096


def _check_cap(rows, cols, cap):
    cap = DIMENSION_CAP if cap is None else cap
    if rows > cap or cols > cap:
        raise SizeOverflow(
            f"result would be {rows}x{cols}, exceeding the dimension cap of {cap}"
        )


def opnorm(a) -> float:
    """Max absolute row sum norm."""
    a = np.asarray(a, dtype=float)
    if a.size == 0:
        return 0.0
    return float(np.abs(a).sum(axis=-1).max())


def kron(a, b, cap: int | None = None) -> np.ndarray:
    a = np.atleast_2d(np.asarray(a, dtype=float))
    b = np.atleast_2d(np.asarray(b, dtype=float))
    _check_cap(a.shape[0] * b.shape[0], a.shape[1] * b.shape[1], cap)
    return np.kron(a, b)


def kron_power(a, r: int, cap: int | None = None) -> np.ndarray:
    """``a (x) a (x) ... (x) a`` with ``r`` factors."""
    a = np.atleast_2d(np.asarray(a, dtype=float))
    if r < 1:
        raise ValueError("r must be a positive integer")
    if a.shape[0] != a.shape[1]:
        raise ShapeMismatch(f"kron_power needs a square matrix, got {a.shape}")
    _check_cap(a.shape[0] ** r, a.shape[1] ** r, cap)
    out = a
    for _ in range(r - 1):
        out = np.kron(out, a)
    return out


def spectral_radius(a, tol: float = 1e-9, max_squarings: int = 60) -> float:
    """Spectral radius by the Gelfand formula with repeated squaring.

    Tracks ``a^(2^k) = exp(l_k) M_k`` where ``M_{k+1} = (M_k / ||M_k||)^2``
    and ``l_{k+1} = 2 (l_k + log ||M_k||)``, and estimates
    ``rho = ||a^(2^k)||^(2^-k)``.  Iteration stops once two successive
    relative changes are below ``tol``.  For entrywise nonnegative input the
    result is the Perron root.

    If ``max_squarings`` is exhausted the last estimate is returned and a
    :class:`~pgarch.errors.ConvergenceWarning` is issued.
    """
    m = np.array(a, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ShapeMismatch(f"spectral_radius needs a square matrix, got {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("spectral_radius needs finite entries")

    log_scale = 0.0
    estimate = None
    calm = 0
    for k in range(max_squarings + 1):
        norm = opnorm(m)
        if norm == 0.0:
            return 0.0
        new = math.exp((log_scale + math.log(norm)) / 2.0**k)
        if estimate is not None:
            if abs(new - estimate) <= tol * new:
                calm += 1
                if calm == 2:
                    return new
            else:
                calm = 0
        estimate = new
        if k == max_squarings:
            break
        m = m / norm
        m = m @ m
        log_scale = 2.0 * (log_scale + math.log(norm))
    warnings.warn(
        f"spectral_radius did not converge in {max_squarings} squarings",
        ConvergenceWarning,
        stacklevel=2,
    )
    return estimate


def solve_neumann(m, b, tol: float = 1e-9) -> np.ndarray:
    """Solve ``(I - m) x = b`` for ``rho(m) < 1``.

    Equivalent to summing the Neumann series ``sum_k m^k b``.

    Raises
    ------
    SpectralRadiusAtLeastOne
        If ``rho(m) >= 1``.
    SingularSystem
        If the LU solve breaks down or the residual check fails.
    """
    m = np.atleast_2d(np.asarray(m, dtype=float))
    b = np.asarray(b, dtype=float)
    n = m.shape[0]
    if m.shape != (n, n) or b.shape[0] != n:
        raise ShapeMismatch(f"solve_neumann: m is {m.shape}, b is {b.shape}")
    rho = spectral_radius(m, tol)
    if rho >= 1.0:
        raise SpectralRadiusAtLeastOne(f"spectral radius {rho:.12g} >= 1")
    lhs = np.eye(n) - m
    try:
        x = np.linalg.solve(lhs, b)
    except np.linalg.LinAlgError as exc:
        raise SingularSystem(str(exc)) from None
    residual = float(np.max(np.abs(lhs @ x - b), initial=0.0))
    if not np.all(np.isfinite(x)) or residual > 1e-10 * (1.0 + np.max(np.abs(b), initial=0.0)):
        raise SingularSystem(f"residual {residual:.3g} too large (rho={rho:.12g})")
    return x


def product_seq(ms, size: int | None = None) -> np.ndarray:
    """Left-to-right product ``ms[0] @ ms[1] @ ...``.

    An empty sequence gives the identity of order ``size``.
    """
    ms = list(ms)
    if not ms:
        if size is None:
            raise ValueError("product_seq of an empty list needs size")
        return np.eye(size)
    out = np.atleast_2d(np.asarray(ms[0], dtype=float))
    for k, nxt in enumerate(ms[1:], start=1):
        nxt = np.atleast_2d(np.asarray(nxt, dtype=float))
        if out.shape[1] != nxt.shape[0]:
            raise ShapeMismatch(
                f"factor {k} has {nxt.shape[0]} rows, previous product has {out.shape[1]} columns"
            )
        out = out @ nxt
    return out
