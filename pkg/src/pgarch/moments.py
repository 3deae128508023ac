"""
Analytic seasonal moments of the squared PGARCH process.

For the state vector ``Y`` of :mod:`pgarch.statespace`:

* ``mu1(v) = E Y[st+v]``, length ``d``;
* ``mu2(v) = E Y[st+v] (x) Y[st+v]``, length ``d^2``;
* ``gamma_v(h) = E Y[st+v] (x) Y[st+v-h]``, length ``d^2``.

Kronecker vectors use row-major order, so component ``i d + j`` is
``E Y_i Y_j``.  Component 0 of ``Y`` is ``x^2`` and component ``p`` is ``h``
(orders normalized to ``p = q``).  Seasons are 1-based and wrap modulo ``s``
in both directions.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass

import numpy as np

from pgarch.certify import Verdict, check_L1, check_Lr
from pgarch.errors import NotGarch11, NotStationary, SpectralRadiusAtLeastOne
from pgarch.matalg import product_seq, solve_neumann
from pgarch.model import ModelSpec, innovation_moment, normalize_orders
from pgarch.statespace import (
    cross_moment_phi_b,
    intercept_mean,
    phi_kron_moment,
    phi_mean,
)

__all__ = [
    "MomentTable",
    "Garch11ClosedForm",
    "seasonal_mean",
    "seasonal_second",
    "cross_moment_lag",
    "autocov_sq",
    "moment_table",
    "garch11_closed_forms",
]


def _wrap(v, s):
    """0-based row of season ``v`` (any integer)."""
    return (v - 1) % s


def _require(cert, what):
    if cert.verdict is not Verdict.HOLDS:
        raise SpectralRadiusAtLeastOne(
            f"{what} needs {cert.check_id} to hold; verdict is {cert.verdict.value} "
            f"(rho={cert.evidence['rho']:.12g})"
        )


def _periodic_solve(mats, intercepts):
    """Periodic solution of ``m(v) = mats[v] m(v-1) + intercepts[v]``.

    ``mats`` and ``intercepts`` are indexed by season row ``0..s-1``.  The
    annual fixed point ``m(s) = (I - P)^{-1} c`` with ``P = M_s ... M_1`` is
    solved first, then the other seasons follow by forward recursion.
    """
    s = len(mats)
    product = product_seq(mats[::-1])
    c = np.zeros_like(intercepts[0])
    for v in range(s):
        c = mats[v] @ c + intercepts[v]
    out = np.empty((s, c.size))
    out[s - 1] = solve_neumann(product, c)
    prev = out[s - 1]
    for v in range(s - 1):
        prev = mats[v] @ prev + intercepts[v]
        out[v] = prev
    return out


def seasonal_mean(spec: ModelSpec) -> np.ndarray:
    """``mu1(v)`` for ``v = 1..s`` as an ``(s, d)`` array.

    Raises :class:`~pgarch.errors.SpectralRadiusAtLeastOne` unless
    :func:`~pgarch.certify.check_L1` holds.
    """
    _require(check_L1(spec), "seasonal_mean")
    spec = normalize_orders(spec)
    seasons = range(1, spec.period + 1)
    return _periodic_solve(
        [phi_mean(spec, v) for v in seasons], [intercept_mean(spec, v) for v in seasons]
    )


def seasonal_second(spec: ModelSpec, mu1: np.ndarray | None = None) -> np.ndarray:
    """``mu2(v)`` for ``v = 1..s`` as an ``(s, d^2)`` array.

    Raises :class:`~pgarch.errors.SpectralRadiusAtLeastOne` unless
    ``check_Lr(spec, 2)`` holds, and
    :class:`~pgarch.errors.MomentDoesNotExist` if ``E eps^4`` is infinite.
    """
    _require(check_Lr(spec, 2), "seasonal_second")
    spec = normalize_orders(spec)
    if mu1 is None:
        mu1 = seasonal_mean(spec)
    s = spec.period
    mats, intercepts = [], []
    for v in range(1, s + 1):
        mats.append(phi_kron_moment(spec, v, 2))
        X, beta2 = cross_moment_phi_b(spec, v)
        intercepts.append(beta2 + X @ mu1[_wrap(v - 1, s)])
    return _periodic_solve(mats, intercepts)


def _gamma_lags(spec, mu1, mu2, max_lag):
    s, d = spec.period, spec.d
    phis = [phi_mean(spec, v) for v in range(1, s + 1)]
    bs = [intercept_mean(spec, v) for v in range(1, s + 1)]
    gamma = np.empty((s, max_lag + 1, d * d))
    gamma[:, 0] = mu2
    for h in range(1, max_lag + 1):
        for i in range(s):
            prev = gamma[(i - 1) % s, h - 1].reshape(d, d)
            # (phi (x) I) vec(G) = vec(phi G);  B (x) mu1 = vec(B mu1')
            gamma[i, h] = (phis[i] @ prev).ravel() + np.outer(bs[i], mu1[(i - h) % s]).ravel()
    return gamma


@dataclass(frozen=True, eq=False)
class MomentTable:
    """Seasonal moments with lags ``0..max_lag``.

    Attributes
    ----------
    mu1 : ndarray, shape (s, d)
    mu2 : ndarray, shape (s, d*d)
    gamma : ndarray, shape (s, max_lag + 1, d*d)
        ``gamma[v-1, h] = gamma_v(h)``.
    """

    spec: ModelSpec
    mu1: np.ndarray
    mu2: np.ndarray
    gamma: np.ndarray

    @property
    def period(self) -> int:
        return self.spec.period

    @property
    def max_lag(self) -> int:
        return self.gamma.shape[1] - 1

    @property
    def _p(self):
        return max(self.spec.p, self.spec.q, 1)

    @property
    def mean_x2(self) -> np.ndarray:
        return self.mu1[:, 0]

    @property
    def mean_h(self) -> np.ndarray:
        return self.mu1[:, self._p]

    @property
    def mean_x4(self) -> np.ndarray:
        return self.mu2[:, 0]

    @property
    def mean_h2(self) -> np.ndarray:
        p, d = self._p, self.mu1.shape[1]
        return self.mu2[:, p * d + p]

    @property
    def cross_x2(self) -> np.ndarray:
        """``E x^2[st+v] x^2[st+v-h]`` as an ``(s, max_lag + 1)`` array."""
        return self.gamma[:, :, 0]

    @property
    def autocov_sq(self) -> np.ndarray:
        """Centered ``Cov(x^2[st+v], x^2[st+v-h])``, shape ``(s, max_lag + 1)``."""
        s = self.period
        out = self.cross_x2.copy()
        for i in range(s):
            for h in range(self.max_lag + 1):
                out[i, h] -= self.mean_x2[i] * self.mean_x2[(i - h) % s]
        return out

    def gamma_at(self, v: int, h: int) -> np.ndarray:
        if not 0 <= h <= self.max_lag:
            raise ValueError(f"lag must be in 0..{self.max_lag}, got {h}")
        return self.gamma[_wrap(v, self.period), h]

    def autocov_at(self, v: int, h: int) -> float:
        i = _wrap(v, self.period)
        return float(self.gamma_at(v, h)[0] - self.mean_x2[i] * self.mean_x2[(i - h) % self.period])

    def lag_rows(self):
        acov = self.autocov_sq
        for i in range(self.period):
            for h in range(self.max_lag + 1):
                yield i + 1, h, float(self.cross_x2[i, h]), float(acov[i, h])

    def lag_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["season", "lag", "gamma_first_component", "autocov_sq"])
        for row in self.lag_rows():
            writer.writerow([row[0], row[1], repr(row[2]), repr(row[3])])
        return buf.getvalue()

    def to_dict(self) -> dict:
        return {
            "period": self.period,
            "max_lag": self.max_lag,
            "mu1": self.mu1.tolist(),
            "mu2": self.mu2.tolist(),
            "E_x2": self.mean_x2.tolist(),
            "E_x4": self.mean_x4.tolist(),
            "E_h": self.mean_h.tolist(),
            "E_h2": self.mean_h2.tolist(),
            "lags": [
                {"season": v, "lag": h, "gamma_first_component": g, "autocov_sq": a}
                for v, h, g, a in self.lag_rows()
            ],
        }


def moment_table(spec: ModelSpec, max_lag: int | None = None) -> MomentTable:
    """First and second seasonal moments with lag-``h`` cross moments.

    ``max_lag`` defaults to ``10 s``.
    """
    spec = normalize_orders(spec)
    max_lag = 10 * spec.period if max_lag is None else int(max_lag)
    if max_lag < 0:
        raise ValueError("max_lag must be nonnegative")
    mu1 = seasonal_mean(spec)
    mu2 = seasonal_second(spec, mu1)
    gamma = _gamma_lags(spec, mu1, mu2, max_lag)
    for arr in (mu1, mu2, gamma):
        arr.setflags(write=False)
    return MomentTable(spec, mu1, mu2, gamma)


def cross_moment_lag(spec: ModelSpec, v: int, h: int) -> np.ndarray:
    """``gamma_v(h) = E Y[st+v] (x) Y[st+v-h]``."""
    if h < 0:
        raise ValueError("h must be nonnegative")
    return moment_table(spec, max_lag=h).gamma_at(v, h).copy()


def autocov_sq(spec: ModelSpec, v: int, h: int) -> float:
    """``Cov(x^2[st+v], x^2[st+v-h])``."""
    if h < 0:
        raise ValueError("h must be nonnegative")
    return moment_table(spec, max_lag=h).autocov_at(v, h)


# -- PGARCH(1,1) scalar recursions ---------------------------------------------


@dataclass(frozen=True, eq=False)
class Garch11ClosedForm:
    """Scalar seasonal moments of a PGARCH(1,1), indexed by season row.

    ``mu1`` is ``E x^2 = E h``; ``mu2`` is ``E x^4 = kappa2 E h^2``;
    ``gamma[v-1, h] = E x^2[st+v] x^2[st+v-h]``.  Second-order fields are
    ``None`` when ``prod theta2 >= 1``.
    """

    theta1: np.ndarray
    theta2: np.ndarray
    mu1: np.ndarray
    eh2: np.ndarray | None
    mu2: np.ndarray | None
    gamma: np.ndarray | None

    @property
    def rho1(self) -> float:
        return float(np.prod(self.theta1))

    @property
    def rho2(self) -> float:
        return float(np.prod(self.theta2))


def _scalar_periodic(theta, c):
    """Periodic solution of ``m(v) = c(v) + theta(v) m(v-1)``."""
    s = len(theta)
    # m(s) = (1 - prod theta)^{-1} sum_j (prod_{k<j} theta(s-k)) c(s-j)
    acc, weight = 0.0, 1.0
    for j in range(s):
        acc += weight * c[s - 1 - j]
        weight *= theta[s - 1 - j]
    out = np.empty(s)
    out[s - 1] = acc / (1.0 - weight)
    prev = out[s - 1]
    for i in range(s - 1):
        prev = c[i] + theta[i] * prev
        out[i] = prev
    return out


def garch11_closed_forms(spec: ModelSpec, max_lag: int | None = None) -> Garch11ClosedForm:
    """Evaluate the PGARCH(1,1) scalar moment recursions directly.

    Independent of the matrix engine; used as a cross-check.

    Raises
    ------
    NotGarch11
        If ``p > 1`` or ``q > 1``.
    NotStationary
        If ``prod theta1 >= 1``.
    """
    if max(spec.p, spec.q) > 1:
        raise NotGarch11(f"needs p, q <= 1, got p={spec.p}, q={spec.q}")
    spec = normalize_orders(spec)
    s = spec.period
    max_lag = 10 * s if max_lag is None else int(max_lag)
    a0 = spec.alpha0.copy()
    a1 = spec.alpha[:, 0].copy()
    b1 = spec.beta[:, 0].copy()
    kappa2 = innovation_moment(spec.innovation, 2)

    theta1 = a1 + b1
    with np.errstate(invalid="ignore"):
        theta2 = kappa2 * a1**2 + b1**2 + 2 * a1 * b1
    if np.prod(theta1) >= 1.0:
        raise NotStationary(f"prod theta1 = {np.prod(theta1):.12g} >= 1")
    mu1 = _scalar_periodic(theta1, a0)

    if not math.isfinite(kappa2) or np.prod(theta2) >= 1.0:
        return Garch11ClosedForm(theta1, theta2, mu1, None, None, None)
    prev_mu1 = np.roll(mu1, 1)  # mu1(v-1)
    eh2 = _scalar_periodic(theta2, a0**2 + 2 * a0 * theta1 * prev_mu1)
    mu2 = kappa2 * eh2

    gamma = np.empty((s, max_lag + 1))
    gamma[:, 0] = mu2
    for h in range(1, max_lag + 1):
        for i in range(s):
            if h == 1:
                # x^2[v-1] = eta h[v-1] enters h[v] through alpha1 and beta1 differently
                gamma[i, 1] = a0[i] * mu1[i - 1] + (kappa2 * a1[i] + b1[i]) * eh2[i - 1]
            else:
                gamma[i, h] = a0[i] * mu1[(i - h) % s] + theta1[i] * gamma[(i - 1) % s, h - 1]
    return Garch11ClosedForm(theta1, theta2, mu1, eh2, mu2, gamma)
