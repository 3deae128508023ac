"""
Sample paths, empirical seasonal statistics and the Monte Carlo harness.

Recorded year ``t`` and season ``v`` use draw ``t s + (v - 1)`` of the
counter-based stream ``(seed, SIMULATION, 0)``.  Burn-in year ``-b`` (``b``
years before the first recorded one) uses draw ``(b - 1) s + (v - 1)`` of
stream ``(seed, SIMULATION, 1)``.  A path is a pure function of
``(spec, seed, n_years, burnin_years)``, and changing ``burnin_years`` only
adds or removes draws in the far past: the recorded innovations stay the same.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path as FsPath

import numpy as np

from pgarch.errors import NumericOverflow, TooShort
from pgarch.model import ModelSpec, normalize_orders
from pgarch.moments import MomentTable, moment_table
from pgarch.rng import SIMULATION, innovations
from pgarch.statespace import season_blocks

__all__ = [
    "Path",
    "SeasonalStats",
    "VerificationReport",
    "simulate_path",
    "batch_means",
    "empirical_stats",
    "compare",
    "verify",
]

DEFAULT_BURNIN = 1000
CEILING = 1e300
MIN_YEARS = 60


@dataclass(frozen=True, eq=False)
class Path:
    """A simulated path; ``x`` and ``h`` have shape ``(n_years, s)``."""

    spec_fingerprint: str
    seed: int
    n_years: int
    burnin_years: int
    x: np.ndarray
    h: np.ndarray

    @property
    def period(self) -> int:
        return self.x.shape[1]

    @property
    def x2(self) -> np.ndarray:
        return self.x**2

    def write_csv(self, target) -> None:
        """Write ``year,season,x,h`` rows; ``target`` is a path or text file."""
        if isinstance(target, (str, FsPath)):
            with open(target, "w", newline="") as fh:
                self.write_csv(fh)
            return
        writer = csv.writer(target, lineterminator="\n")
        writer.writerow(["year", "season", "x", "h"])
        for t in range(self.n_years):
            for i in range(self.period):
                writer.writerow([t, i + 1, repr(float(self.x[t, i])), repr(float(self.h[t, i]))])


def _eps(spec, seed, n_years, burnin_years):
    s = spec.period
    recorded = innovations(spec.innovation, seed, SIMULATION, 0, 0, n_years * s)
    burn = innovations(spec.innovation, seed, SIMULATION, 1, 0, burnin_years * s)
    burn = burn.reshape(burnin_years, s)[::-1].ravel()
    return np.concatenate([burn, recorded])


def _overflow(n, s, offset, ceiling):
    year, season = n // s - offset, n % s + 1
    return NumericOverflow(
        f"h exceeded {ceiling:g} at year {year}, season {season}"
        + (" (burn-in)" if year < 0 else ""),
        year,
        season,
    )


def _run_scalar(spec, eps, ceiling, offset):
    s, p, q = spec.period, spec.p, spec.q
    a0 = spec.alpha0.tolist()
    a = spec.alpha.tolist()
    b = spec.beta.tolist()
    k = max(p, q, 1)
    # lag slot j (1-based) of time 0 sits at time -j
    x2_lags = [0.0] * k
    h_lags = [a0[(-j) % s] for j in range(1, k + 1)]
    h_out = np.empty(eps.size)
    for n, e in enumerate(eps.tolist()):
        i = n % s
        hn = a0[i]
        ai, bi = a[i], b[i]
        for j in range(p):
            hn += ai[j] * x2_lags[j]
        for j in range(q):
            hn += bi[j] * h_lags[j]
        if not hn <= ceiling:
            raise _overflow(n, s, offset, ceiling)
        x2_lags.pop()
        x2_lags.insert(0, e * e * hn)
        h_lags.pop()
        h_lags.insert(0, hn)
        h_out[n] = hn
    return h_out


def _run_statespace(spec, eps, ceiling, offset):
    spec = normalize_orders(spec)
    s, p = spec.period, spec.p
    blocks = season_blocks(spec)
    Y = np.zeros(spec.d)
    Y[p:] = [spec.alpha0[(-j) % s] for j in range(1, p + 1)]
    h_out = np.empty(eps.size)
    for n, e in enumerate(eps):
        blk = blocks[n % s]
        eta = e * e
        Y = blk.phi(eta) @ Y + blk.intercept(eta)
        if not Y[p] <= ceiling:
            raise _overflow(n, s, offset, ceiling)
        h_out[n] = Y[p]
    return h_out


def simulate_path(
    spec: ModelSpec,
    n_years: int,
    burnin_years: int = DEFAULT_BURNIN,
    seed: int = 0,
    method: str = "recursion",
    ceiling: float = CEILING,
) -> Path:
    """Simulate ``x[st+v] = eps[st+v] sqrt(h[st+v])``.

    Pre-sample values are ``x^2 = 0`` and ``h = alpha0`` of the lag slot's
    season.  ``method="statespace"`` runs the vector recursion on the state
    instead of the scalar volatility equation; both consume the same draws.

    Raises
    ------
    NumericOverflow
        If ``h`` exceeds ``ceiling`` (or stops being finite).  Its ``year``
        counts from the first recorded year, so burn-in years are negative.
    """
    if n_years < 1:
        raise ValueError("n_years must be >= 1")
    if burnin_years < 0:
        raise ValueError("burnin_years must be >= 0")
    if method not in ("recursion", "statespace"):
        raise ValueError(f"method must be 'recursion' or 'statespace', got {method!r}")
    s = spec.period
    eps = _eps(spec, seed, n_years, burnin_years)
    run = _run_scalar if method == "recursion" else _run_statespace
    h = run(spec, eps, ceiling, burnin_years)
    keep = slice(burnin_years * s, None)
    h = h[keep].reshape(n_years, s)
    x = eps[keep].reshape(n_years, s) * np.sqrt(h)
    return Path(spec.fingerprint(), int(seed), int(n_years), int(burnin_years), x, h)


# -- empirical statistics ------------------------------------------------------


def batch_means(values: np.ndarray, n_batches: int | None = None):
    """Mean and batch-means standard error along axis 0.

    Uses ``max(30, floor(sqrt(n)))`` equal batches of contiguous rows; the
    leading ``n mod n_batches`` rows are dropped.
    """
    values = np.asarray(values, dtype=float)
    n = values.shape[0]
    if n_batches is None:
        n_batches = max(30, math.isqrt(n))
    size = n // n_batches
    if size < 2:
        raise TooShort(f"{n} rows cannot form {n_batches} batches of >= 2")
    used = values[n - n_batches * size:]
    means = used.reshape(n_batches, size, *values.shape[1:]).mean(axis=1)
    return means.mean(axis=0), means.std(axis=0, ddof=1) / math.sqrt(n_batches)


@dataclass(frozen=True, eq=False)
class SeasonalStats:
    """Per-season sample moments with batch-means standard errors.

    ``cross[v-1, h]`` estimates ``E x^2[st+v] x^2[st+v-h]``.
    """

    n_years: int
    mean_x2: np.ndarray
    se_mean_x2: np.ndarray
    mean_x4: np.ndarray
    se_mean_x4: np.ndarray
    mean_h: np.ndarray
    se_mean_h: np.ndarray
    mean_h2: np.ndarray
    se_mean_h2: np.ndarray
    cross: np.ndarray
    se_cross: np.ndarray

    @property
    def max_lag(self) -> int:
        return self.cross.shape[1] - 1


def empirical_stats(path: Path, max_lag: int = 4) -> SeasonalStats:
    """Sample seasonal moments of a path.

    Lagged products use the years ``t >= ceil(max_lag / s)`` so that every
    lag is available in every kept year.

    Raises
    ------
    TooShort
        If the path has fewer than 60 years.
    """
    n, s = path.x.shape
    if n < MIN_YEARS:
        raise TooShort(f"need >= {MIN_YEARS} years for batch means, got {n}")
    x2 = path.x2
    h = path.h
    m_x2, se_x2 = batch_means(x2)
    m_x4, se_x4 = batch_means(x2**2)
    m_h, se_h = batch_means(h)
    m_h2, se_h2 = batch_means(h**2)

    t0 = -(-max_lag // s)
    if n - t0 < MIN_YEARS:
        raise TooShort(f"need >= {MIN_YEARS} years after the first {t0} for lag {max_lag}")
    flat = x2.ravel()
    base = np.arange(t0, n)[:, None] * s + np.arange(s)[None, :]
    products = np.stack([x2[t0:] * flat[base - lag] for lag in range(max_lag + 1)], axis=2)
    m_c, se_c = batch_means(products)
    return SeasonalStats(n, m_x2, se_x2, m_x4, se_x4, m_h, se_h, m_h2, se_h2, m_c, se_c)


# -- verification harness ------------------------------------------------------


@dataclass
class VerificationReport:
    """z-scores ``(analytic - empirical) / SE`` for every compared quantity."""

    rows: list = field(default_factory=list)
    z_fail: float = 4.0
    z_warn: float = 3.0
    max_warn_fraction: float = 0.10

    @property
    def z(self) -> np.ndarray:
        return np.array([row["z"] for row in self.rows])

    @property
    def failures(self) -> list:
        return [row["quantity"] for row in self.rows if not abs(row["z"]) <= self.z_fail]

    @property
    def warn_fraction(self) -> float:
        if not self.rows:
            return 0.0
        return float(np.mean(np.abs(self.z) > self.z_warn))

    @property
    def passed(self) -> bool:
        return not self.failures and self.warn_fraction <= self.max_warn_fraction

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "failures": self.failures,
            "fraction_abs_z_over_3": self.warn_fraction,
            "rows": [dict(row) for row in self.rows],
        }


def _z(analytic, empirical, se):
    diff = analytic - empirical
    scale = 1.0 + abs(analytic)
    if se <= 1e-12 * scale:
        if abs(diff) <= 1e-8 * scale:
            return 0.0
        return math.copysign(math.inf, diff)
    return diff / se


def compare(table: MomentTable, stats: SeasonalStats) -> VerificationReport:
    """Line up analytic and empirical moments and compute z-scores."""
    s = table.period
    max_lag = min(table.max_lag, stats.max_lag)
    rows = []

    def add(name, analytic, empirical, se):
        analytic, empirical, se = float(analytic), float(empirical), float(se)
        rows.append(
            {"quantity": name, "analytic": analytic, "empirical": empirical,
             "se": se, "z": _z(analytic, empirical, se)}
        )

    for i in range(s):
        v = i + 1
        add(f"E[x^2](v={v})", table.mean_x2[i], stats.mean_x2[i], stats.se_mean_x2[i])
        add(f"E[x^4](v={v})", table.mean_x4[i], stats.mean_x4[i], stats.se_mean_x4[i])
        add(f"E[h](v={v})", table.mean_h[i], stats.mean_h[i], stats.se_mean_h[i])
        add(f"E[h^2](v={v})", table.mean_h2[i], stats.mean_h2[i], stats.se_mean_h2[i])
        for lag in range(1, max_lag + 1):
            add(
                f"gamma(v={v},h={lag})",
                table.cross_x2[i, lag],
                stats.cross[i, lag],
                stats.se_cross[i, lag],
            )
    return VerificationReport(rows)


def verify(
    spec: ModelSpec,
    n_years: int = 200_000,
    seed: int = 0,
    max_lag: int = 4,
    burnin_years: int = DEFAULT_BURNIN,
) -> VerificationReport:
    """Compare analytic moments with a simulated path of ``n_years`` years.

    Raises :class:`~pgarch.errors.SpectralRadiusAtLeastOne` when fourth
    moments do not exist (``check_Lr(spec, 2)`` does not hold).
    """
    table = moment_table(spec, max_lag)
    path = simulate_path(spec, n_years, burnin_years, seed)
    return compare(table, empirical_stats(path, max_lag))
