"""
Markovian state-space representation of the squared PGARCH process.

With ``y[st+v] = x^2[st+v]`` and ``eta = eps^2``, the state vector

    Y[st+v] = (y[st+v], ..., y[st+v-p+1], h[st+v], ..., h[st+v-q+1])'

obeys ``Y[st+v] = phi_v(eta) Y[st+v-1] + B_v(eta)`` where both terms are
affine in the single scalar ``eta = eta[st+v]``:

    phi_v(eta) = C_v + eta D_v,        B_v(eta) = b0_v + eta b1_v.

Every expectation needed downstream is then a finite sum over powers of
``eta``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from pgarch.errors import MomentDoesNotExist, SizeOverflow
from pgarch.matalg import DIMENSION_CAP, product_seq
from pgarch.model import ModelSpec, innovation_moment, normalize_orders

__all__ = [
    "SeasonBlocks",
    "CompanionSystem",
    "build_season_blocks",
    "season_blocks",
    "phi_mean",
    "intercept_mean",
    "phi_kron_moment",
    "kron_moment_product",
    "cross_moment_phi_b",
    "build_companion",
    "sample_phi",
    "stacked_matrix",
]


@dataclass(frozen=True, eq=False)
class SeasonBlocks:
    """Affine pieces of the season-``v`` transition.

    ``C`` and ``b0`` are the deterministic parts; ``D`` and ``b1`` multiply
    the squared innovation.
    """

    season: int
    C: np.ndarray
    D: np.ndarray
    b0: np.ndarray
    b1: np.ndarray

    @property
    def d(self) -> int:
        return self.C.shape[0]

    def phi(self, eta: float) -> np.ndarray:
        return self.C + eta * self.D

    def intercept(self, eta: float) -> np.ndarray:
        return self.b0 + eta * self.b1


@dataclass(frozen=True, eq=False)
class CompanionSystem:
    """Mean of the stacked annual system ``Y_t = A(eta_t) Y_{t-1} + B(eta_t)``.

    ``A_mean`` is ``ds x ds`` with a single nonzero block column (the last),
    whose block row ``j`` is ``phi_j ... phi_1``.  ``seasonal_product`` is
    ``phi_s ... phi_1``.
    """

    A_mean: np.ndarray
    B_mean: np.ndarray
    seasonal_product: np.ndarray
    selector: np.ndarray


def _season_index(spec, v):
    if not 1 <= v <= spec.period:
        raise ValueError(f"season must be in 1..{spec.period}, got {v}")
    return v - 1


def build_season_blocks(spec: ModelSpec, v: int) -> SeasonBlocks:
    spec = normalize_orders(spec)
    i = _season_index(spec, v)
    p, d = spec.p, spec.d
    coef = np.concatenate([spec.alpha[i], spec.beta[i]])

    C = np.zeros((d, d))
    C[p, :] = coef
    for k in range(1, p):
        C[k, k - 1] = 1.0  # lagged x^2
        C[p + k, p + k - 1] = 1.0  # lagged h
    D = np.zeros((d, d))
    D[0, :] = coef

    b0 = np.zeros(d)
    b0[p] = spec.alpha0[i]
    b1 = np.zeros(d)
    b1[0] = spec.alpha0[i]
    return SeasonBlocks(v, C, D, b0, b1)


def season_blocks(spec: ModelSpec) -> list[SeasonBlocks]:
    """Blocks for seasons ``1..s`` in order."""
    return [build_season_blocks(spec, v) for v in range(1, spec.period + 1)]


def sample_phi(blocks: SeasonBlocks, eta: float, with_intercept: bool = False):
    if eta < 0:
        raise ValueError("eta must be nonnegative")
    if with_intercept:
        return blocks.phi(eta), blocks.intercept(eta)
    return blocks.phi(eta)


def phi_mean(spec: ModelSpec, v: int) -> np.ndarray:
    """``E phi_v(eta) = C_v + D_v`` since ``E eta = 1``."""
    blk = build_season_blocks(spec, v)
    return blk.C + blk.D


def intercept_mean(spec: ModelSpec, v: int) -> np.ndarray:
    blk = build_season_blocks(spec, v)
    return blk.b0 + blk.b1


def _kappas(spec, r):
    kappas = [innovation_moment(spec.innovation, m) for m in range(r + 1)]
    if not np.isfinite(kappas[-1]):
        raise MomentDoesNotExist(
            f"E[eps^{2 * r}] is infinite for {spec.innovation}"
        )
    return kappas


def _eta_polynomial_kron(C, D, r):
    """Coefficients ``S_k`` of ``(C + eta D)^{(x) r} = sum_k eta^k S_k``.

    ``S_k`` sums the Kronecker words with exactly ``k`` factors equal to ``D``.
    """
    coeffs = [C, D]
    for _ in range(r - 1):
        nxt = [np.kron(coeffs[0], C)]
        for k in range(1, len(coeffs)):
            nxt.append(np.kron(coeffs[k], C) + np.kron(coeffs[k - 1], D))
        nxt.append(np.kron(coeffs[-1], D))
        coeffs = nxt
    return coeffs


def phi_kron_moment(spec: ModelSpec, v: int, r: int, cap: int | None = None) -> np.ndarray:
    """``E[phi_v(eta)^{(x) r}] = sum_k kappa_k S_k`` with ``kappa_k = E eta^k``."""
    if r < 1:
        raise ValueError("r must be a positive integer")
    spec = normalize_orders(spec)
    cap = DIMENSION_CAP if cap is None else cap
    if spec.d**r > cap:
        raise SizeOverflow(f"d^r = {spec.d}^{r} exceeds the dimension cap of {cap}")
    kappas = _kappas(spec, r)
    blk = build_season_blocks(spec, v)
    if r == 1:
        return blk.C + blk.D
    coeffs = _eta_polynomial_kron(blk.C, blk.D, r)
    return sum(kappa * s_k for kappa, s_k in zip(kappas, coeffs))


def kron_moment_product(spec: ModelSpec, r: int, cap: int | None = None) -> np.ndarray:
    """``E phi_s^{(x)r} ... E phi_1^{(x)r}``; ``r = 1`` gives the seasonal product."""
    mats = [phi_kron_moment(spec, v, r, cap) for v in range(spec.period, 0, -1)]
    return product_seq(mats)


def cross_moment_phi_b(spec: ModelSpec, v: int, blocks: SeasonBlocks | None = None):
    """Mixed moments entering the second-moment recursion.

    Returns
    -------
    X : ndarray, shape (d*d, d)
        ``E[phi_v (x) B_v + B_v (x) phi_v]``, acting on ``E Y[st+v-1]``.
    beta2 : ndarray, shape (d*d,)
        ``E[B_v (x) B_v]``.
    """
    spec = normalize_orders(spec)
    kappa2 = _kappas(spec, 2)[2]
    blk = build_season_blocks(spec, v) if blocks is None else blocks
    C, D = blk.C, blk.D
    b0 = blk.b0[:, None]
    b1 = blk.b1[:, None]
    X = (
        np.kron(C, b0) + np.kron(C, b1) + np.kron(D, b0) + kappa2 * np.kron(D, b1)
        + np.kron(b0, C) + np.kron(b1, C) + np.kron(b0, D) + kappa2 * np.kron(b1, D)
    )
    beta2 = (
        np.kron(b0, b0) + np.kron(b0, b1) + np.kron(b1, b0) + kappa2 * np.kron(b1, b1)
    ).ravel()
    return X, beta2


def build_companion(spec: ModelSpec) -> CompanionSystem:
    spec = normalize_orders(spec)
    s, d = spec.period, spec.d
    phis = [phi_mean(spec, v) for v in range(1, s + 1)]
    bs = [intercept_mean(spec, v) for v in range(1, s + 1)]

    A = np.zeros((d * s, d * s))
    B = np.zeros(d * s)
    partial = np.eye(d)
    state = np.zeros(d)
    for j in range(s):
        partial = phis[j] @ partial
        state = phis[j] @ state + bs[j]
        A[j * d:(j + 1) * d, (s - 1) * d:] = partial
        B[j * d:(j + 1) * d] = state
    seasonal = product_seq(phis[::-1])
    selector = np.zeros(d)
    selector[0] = 1.0
    return CompanionSystem(A, B, seasonal, selector)


def stacked_matrix(blocks: list[SeasonBlocks], etas) -> np.ndarray:
    """The random ``ds x ds`` matrix ``A(eta_t)`` for one year of draws."""
    s = len(blocks)
    d = blocks[0].d
    A = np.zeros((d * s, d * s))
    partial = np.eye(d)
    for j, (blk, eta) in enumerate(zip(blocks, etas)):
        partial = blk.phi(eta) @ partial
        A[j * d:(j + 1) * d, (s - 1) * d:] = partial
    return A
