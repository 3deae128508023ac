"""
Periodic GARCH toolkit.

Stationarity and moment certificates, analytic seasonal moments, Lyapunov
exponent estimation and Monte Carlo verification for PGARCH(p, q) models.
"""

__version__ = "0.1.0"

from pgarch.certify import (  # noqa: E402
    Certificate,
    LyapunovEstimate,
    Verdict,
    check_ergodicity,
    check_L1,
    check_Lr,
    estimate_lyapunov,
    garch11_strict_condition,
    lyapunov_certificate,
)
from pgarch.model import (  # noqa: E402
    InnovationDist,
    ModelSpec,
    gaussian,
    load_spec,
    normalize_orders,
    save_spec,
    student_t,
    unit,
    validate_spec,
)
from pgarch.moments import (  # noqa: E402
    MomentTable,
    garch11_closed_forms,
    moment_table,
    seasonal_mean,
    seasonal_second,
)
from pgarch.simulate import empirical_stats, simulate_path, verify  # noqa: E402

__all__ = [
    "Certificate",
    "InnovationDist",
    "LyapunovEstimate",
    "ModelSpec",
    "MomentTable",
    "Verdict",
    "check_ergodicity",
    "check_L1",
    "check_Lr",
    "empirical_stats",
    "estimate_lyapunov",
    "garch11_closed_forms",
    "garch11_strict_condition",
    "gaussian",
    "load_spec",
    "lyapunov_certificate",
    "moment_table",
    "normalize_orders",
    "save_spec",
    "seasonal_mean",
    "seasonal_second",
    "simulate_path",
    "student_t",
    "unit",
    "validate_spec",
    "verify",
]
