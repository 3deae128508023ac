"""
Periodic GARCH model specifications and innovation laws.

A PGARCH(p, q) process with period ``s`` is

    x[st+v] = eps[st+v] * sqrt(h[st+v])
    h[st+v] = alpha0(v) + sum_i alpha_i(v) x^2[st+v-i] + sum_j beta_j(v) h[st+v-j]

for seasons ``v = 1..s``.  Coefficient arrays are stored with season ``v`` in
row ``v - 1``.
"""

from __future__ import annotations

import hashlib
import json
import math
from collections.abc import Mapping
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from pgarch.errors import (
    BadDimensions,
    NegativeCoefficient,
    NonFiniteValue,
    NonPositiveIntercept,
    SpecError,
)

__all__ = [
    "InnovationDist",
    "ModelSpec",
    "gaussian",
    "student_t",
    "unit",
    "validate_spec",
    "normalize_orders",
    "innovation_moment",
    "load_spec",
    "save_spec",
]

KINDS = ("gaussian", "student_t", "unit")


@dataclass(frozen=True)
class InnovationDist:
    """Law of the i.i.d. innovations ``eps``.

    Every supported law is symmetric with unit variance.  ``student_t`` is the
    Student t with ``nu`` degrees of freedom rescaled by ``sqrt((nu - 2) / nu)``.
    ``unit`` is the +/-1 coin; it is deterministic after squaring and is meant
    for testing only.
    """

    kind: str = "gaussian"
    nu: float | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise SpecError(f"innovation.kind: unknown kind {self.kind!r}")
        if self.kind == "student_t":
            if self.nu is None or not math.isfinite(self.nu) or self.nu <= 4:
                raise SpecError("innovation.nu: student_t requires finite nu > 4")
            object.__setattr__(self, "nu", float(self.nu))
        elif self.nu is not None:
            raise SpecError(f"innovation.nu: not used by kind {self.kind!r}")

    def moment(self, m: int) -> float:
        return innovation_moment(self, m)

    @property
    def absolutely_continuous(self) -> bool:
        return self.kind != "unit"

    def to_dict(self) -> dict:
        if self.kind == "student_t":
            return {"kind": self.kind, "nu": self.nu}
        return {"kind": self.kind}

    @classmethod
    def from_dict(cls, data: Mapping) -> InnovationDist:
        if not isinstance(data, Mapping) or "kind" not in data:
            raise SpecError("innovation: expected an object with a 'kind' field")
        extra = set(data) - {"kind", "nu"}
        if extra:
            raise SpecError(f"innovation: unexpected field(s) {sorted(extra)}")
        return cls(kind=data["kind"], nu=data.get("nu"))

    def __str__(self):
        return f"student_t({self.nu:g})" if self.kind == "student_t" else self.kind


def gaussian() -> InnovationDist:
    return InnovationDist("gaussian")


def student_t(nu: float) -> InnovationDist:
    return InnovationDist("student_t", nu)


def unit() -> InnovationDist:
    return InnovationDist("unit")


def innovation_moment(dist: InnovationDist, m: int) -> float:
    """Even innovation moment ``kappa_m = E[eps^(2m)]``.

    Returns ``math.inf`` when the moment does not exist (Student t with
    ``2m >= nu``).

    >>> innovation_moment(gaussian(), 2)
    3.0
    >>> innovation_moment(student_t(5.0), 2)
    9.0
    """
    m = int(m)
    if m < 0:
        raise ValueError("m must be nonnegative")
    if dist.kind == "unit":
        return 1.0
    kappa = 1.0
    if dist.kind == "gaussian":
        # (2m - 1)!!
        for k in range(1, m + 1):
            kappa *= 2 * k - 1
        return kappa
    nu = dist.nu
    if 2 * m >= nu:
        return math.inf
    # E[T^(2m)] ((nu-2)/nu)^m via the ratio kappa_k / kappa_{k-1}
    for k in range(1, m + 1):
        kappa *= (2 * k - 1) * (nu - 2.0) / (nu - 2.0 * k)
    return kappa


def _as_matrix(name, value, rows, cols):
    try:
        arr = np.array(value, dtype=float)
    except (TypeError, ValueError) as exc:
        raise BadDimensions(f"{name}: not a numeric array ({exc})") from None
    if arr.size == 0 and cols == 0:
        arr = np.zeros((rows, 0))
    if arr.ndim != 2 or arr.shape != (rows, cols):
        raise BadDimensions(
            f"{name}: expected shape ({rows}, {cols}), got {arr.shape}"
        )
    return arr


@dataclass(frozen=True, eq=False)
class ModelSpec:
    """A validated PGARCH(p, q) specification.

    Parameters
    ----------
    period : int
        Number of seasons ``s``.
    p, q : int
        ARCH and GARCH orders, constant across seasons.
    alpha0 : array_like, shape (s,)
        Intercepts, all strictly positive.
    alpha : array_like, shape (s, p)
        ARCH coefficients ``alpha[v-1, i-1] = alpha_i(v)``.
    beta : array_like, shape (s, q)
        GARCH coefficients ``beta[v-1, j-1] = beta_j(v)``.
    innovation : InnovationDist
    """

    period: int
    p: int
    q: int
    alpha0: np.ndarray
    alpha: np.ndarray
    beta: np.ndarray
    innovation: InnovationDist = field(default_factory=gaussian)

    def __post_init__(self):
        for name in ("period", "p", "q"):
            value = getattr(self, name)
            if isinstance(value, bool) or not float(value).is_integer():
                raise BadDimensions(f"{name}: must be an integer, got {value!r}")
            object.__setattr__(self, name, int(value))
        s, p, q = self.period, self.p, self.q
        if s < 1:
            raise BadDimensions(f"period: must be >= 1, got {s}")
        if p < 0 or q < 0 or p + q < 1:
            raise BadDimensions(f"orders: need p, q >= 0 and p + q >= 1, got p={p}, q={q}")
        if not isinstance(self.innovation, InnovationDist):
            raise SpecError("innovation: expected an InnovationDist")

        alpha0 = np.array(self.alpha0, dtype=float)
        if alpha0.shape != (s,):
            raise BadDimensions(f"alpha0: expected length {s}, got shape {alpha0.shape}")
        alpha = _as_matrix("alpha", self.alpha, s, p)
        beta = _as_matrix("beta", self.beta, s, q)

        for name, arr in (("alpha0", alpha0), ("alpha", alpha), ("beta", beta)):
            if not np.all(np.isfinite(arr)):
                raise NonFiniteValue(f"{name}: all entries must be finite")
        bad = np.flatnonzero(alpha0 <= 0)
        if bad.size:
            raise NonPositiveIntercept(
                f"alpha0: must be > 0 for every season; season {bad[0] + 1} has {alpha0[bad[0]]!r}"
            )
        for name, arr in (("alpha", alpha), ("beta", beta)):
            if np.any(arr < 0):
                v, k = np.argwhere(arr < 0)[0]
                raise NegativeCoefficient(
                    f"{name}: entry for season {v + 1}, lag {k + 1} is negative ({arr[v, k]!r})"
                )

        for name, arr in (("alpha0", alpha0), ("alpha", alpha), ("beta", beta)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def d(self) -> int:
        """State dimension after order normalization."""
        k = max(self.p, self.q, 1)
        return 2 * k

    def to_dict(self) -> dict:
        return {
            "period": self.period,
            "p": self.p,
            "q": self.q,
            "alpha0": self.alpha0.tolist(),
            "alpha": self.alpha.tolist(),
            "beta": self.beta.tolist(),
            "innovation": self.innovation.to_dict(),
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> ModelSpec:
        if not isinstance(data, Mapping):
            raise SpecError("spec: expected a JSON object")
        required = ("period", "p", "q", "alpha0", "alpha", "beta", "innovation")
        for name in required:
            if name not in data:
                raise SpecError(f"{name}: missing field")
        extra = set(data) - set(required)
        if extra:
            raise SpecError(f"spec: unexpected field(s) {sorted(extra)}")
        return cls(
            period=data["period"],
            p=data["p"],
            q=data["q"],
            alpha0=data["alpha0"],
            alpha=data["alpha"],
            beta=data["beta"],
            innovation=InnovationDist.from_dict(data["innovation"]),
        )

    def canonical_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))

    def fingerprint(self) -> str:
        """SHA-256 of the canonical JSON serialization."""
        return hashlib.sha256(self.canonical_json().encode()).hexdigest()

    def replace(self, **changes) -> ModelSpec:
        fields = dict(
            period=self.period,
            p=self.p,
            q=self.q,
            alpha0=self.alpha0,
            alpha=self.alpha,
            beta=self.beta,
            innovation=self.innovation,
        )
        fields.update(changes)
        return ModelSpec(**fields)

    def __eq__(self, other):
        if not isinstance(other, ModelSpec):
            return NotImplemented
        return self.canonical_json() == other.canonical_json()

    def __hash__(self):
        return hash(self.canonical_json())

    def __repr__(self):
        return (
            f"ModelSpec(period={self.period}, p={self.p}, q={self.q}, "
            f"alpha0={self.alpha0.tolist()}, alpha={self.alpha.tolist()}, "
            f"beta={self.beta.tolist()}, innovation={self.innovation})"
        )


def validate_spec(raw) -> ModelSpec:
    """Validate a candidate specification.

    ``raw`` may be a :class:`ModelSpec` (returned unchanged) or a mapping in
    the JSON spec-file layout.
    """
    if isinstance(raw, ModelSpec):
        return raw
    return ModelSpec.from_dict(raw)


def normalize_orders(spec: ModelSpec) -> ModelSpec:
    """Pad the orders to ``p = q = max(p, q, 1)`` with zero coefficients."""
    k = max(spec.p, spec.q, 1)
    if spec.p == k and spec.q == k:
        return spec
    s = spec.period
    alpha = np.zeros((s, k))
    alpha[:, : spec.p] = spec.alpha
    beta = np.zeros((s, k))
    beta[:, : spec.q] = spec.beta
    return spec.replace(p=k, q=k, alpha=alpha, beta=beta)


def load_spec(path) -> ModelSpec:
    path = Path(path)
    try:
        text = path.read_text()
    except FileNotFoundError:
        raise FileNotFoundError(f"spec_path: file not found: {path}") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecError(f"spec_path: invalid JSON ({exc})") from None
    return validate_spec(data)


def save_spec(spec: ModelSpec, path) -> None:
    Path(path).write_text(json.dumps(spec.to_dict(), indent=2) + "\n")
