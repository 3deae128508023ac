import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.polynomial.hermite_e import hermegauss
from scipy import special

from conftest import garch11, random_spec
from pgarch.certify import (
    Verdict,
    check_ergodicity,
    check_L1,
    check_Lr,
    ergodicity_weights,
    estimate_lyapunov,
    garch11_strict_condition,
    log_moment,
    lyapunov_certificate,
    three_way,
)
from pgarch.errors import (
    InnovationNotAbsolutelyContinuous,
    MomentDoesNotExist,
    NotGarch11,
    SizeOverflow,
)
from pgarch.model import ModelSpec, gaussian, student_t, unit
from pgarch.rng import innovations
from pgarch.statespace import build_companion, kron_moment_product, season_blocks, stacked_matrix

EULER_LOG2 = np.euler_gamma + math.log(2.0)


def perron_by_sign_scan(m, hi=4.0, steps=4000):
    """Largest positive real root of det(zI - m) by a sign scan and bisection."""
    coeffs = np.poly(m)
    grid = np.linspace(hi, 1e-9, steps)
    vals = np.polyval(coeffs, grid)
    for k in range(steps - 1):
        if vals[k] == 0:
            return grid[k]
        if np.sign(vals[k]) != np.sign(vals[k + 1]):
            lo, up = grid[k + 1], grid[k]
            for _ in range(200):
                mid = 0.5 * (lo + up)
                if np.sign(np.polyval(coeffs, mid)) == np.sign(np.polyval(coeffs, up)):
                    up = mid
                else:
                    lo = mid
            return 0.5 * (lo + up)
    return 0.0


class TestThreeWay:
    def test_bands(self):
        assert three_way(0.9) is Verdict.HOLDS
        assert three_way(1.1) is Verdict.FAILS
        assert three_way(1.0 + 5e-9) is Verdict.INCONCLUSIVE
        assert three_way(1.0 - 5e-9) is Verdict.INCONCLUSIVE
        assert three_way(1.0 - 2e-8) is Verdict.HOLDS


class TestL1:
    def test_running_example(self, running):
        cert = check_L1(running)
        assert cert.verdict is Verdict.HOLDS
        assert cert.evidence["rho"] == pytest.approx(0.9, rel=1e-12)
        assert any("strictly stationary" in n for n in cert.notes)

    def test_explosive_season_allowed(self):
        cert = check_L1(garch11([0.1, 0.2], [0.6, 0.25], [0.6, 0.25]))
        assert cert.evidence["rho"] == pytest.approx(0.6, rel=1e-10)
        assert cert.verdict is Verdict.HOLDS

    def test_fails(self):
        cert = check_L1(garch11(0.1, 0.6, 0.6))
        assert cert.evidence["rho"] == pytest.approx(1.2, rel=1e-12)
        assert cert.verdict is Verdict.FAILS

    def test_unit_root_is_inconclusive(self):
        assert check_L1(garch11(0.1, 0.25, 0.75)).verdict is Verdict.INCONCLUSIVE

    def test_to_dict(self, running):
        doc = check_L1(running).to_dict()
        assert doc["check_id"] == "L1" and doc["verdict"] == "holds"


class TestLr:
    def test_running_example(self, running):
        cert = check_Lr(running, 2)
        assert cert.check_id == "L2"
        assert cert.evidence["rho"] == pytest.approx(0.89, rel=1e-8)
        assert cert.verdict is Verdict.HOLDS

    def test_perron_root_by_sign_scan(self, running):
        m = kron_moment_product(running, 2)
        assert perron_by_sign_scan(m) == pytest.approx(0.89, rel=1e-10)
        assert check_Lr(running, 2).evidence["rho"] == pytest.approx(perron_by_sign_scan(m), rel=1e-8)

    @pytest.mark.parametrize("alpha1, rho2, verdict", [
        (0.5, 0.99, Verdict.HOLDS),
        (0.55, 1.1675, Verdict.FAILS),
    ])
    def test_fourth_moment_boundary(self, alpha1, rho2, verdict):
        spec = garch11(0.1, alpha1, 0.2)
        assert check_L1(spec).verdict is Verdict.HOLDS
        cert = check_Lr(spec, 2)
        assert cert.evidence["rho"] == pytest.approx(rho2, rel=1e-8)
        assert cert.verdict is verdict

    def test_unit_innovation_squares_rho1(self):
        rng = np.random.default_rng(9)
        for _ in range(10):
            spec = random_spec(rng, innovation=unit(), scale=1.4)
            rho1 = check_L1(spec).evidence["rho"]
            assert check_Lr(spec, 2).evidence["rho"] == pytest.approx(rho1**2, rel=1e-8)
            assert check_Lr(spec, 3).evidence["rho"] == pytest.approx(rho1**3, rel=1e-8)

    def test_higher_order_note(self, running):
        cert = check_Lr(running, 3)
        assert cert.check_id == "L3"
        assert any("E eps^8" in n for n in cert.notes)
        # gaussian garch11 r=3: E(alpha eta + beta)^3 with kappa3 = 15
        theta3 = 15 * 0.2**3 + 3 * 3 * 0.2**2 * 0.7 + 3 * 0.2 * 0.7**2 + 0.7**3
        assert cert.evidence["rho"] == pytest.approx(theta3, rel=1e-8)

    def test_errors(self, running):
        with pytest.raises(MomentDoesNotExist):
            check_Lr(garch11(0.1, 0.2, 0.7, student_t(5.5)), 3)
        with pytest.raises(SizeOverflow):
            check_Lr(ModelSpec(1, 4, 4, [0.1], [[0.1] * 4], [[0.1] * 4]), 5)
        with pytest.raises(ValueError):
            check_Lr(running, 1)


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), c=st.floats(1.0, 3.0))
def test_scale_monotonicity(seed, c):
    rng = np.random.default_rng(seed)
    spec = random_spec(rng, scale=1.3)
    scaled = spec.replace(alpha=spec.alpha * c, beta=spec.beta * c)
    for check in (check_L1, lambda sp: check_Lr(sp, 2)):
        before, after = check(spec).verdict, check(scaled).verdict
        assert not (before is Verdict.FAILS and after is Verdict.HOLDS)


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_second_order_needed_for_fourth(seed):
    spec = random_spec(np.random.default_rng(seed), scale=1.5)
    if check_Lr(spec, 2).verdict is Verdict.HOLDS:
        assert check_L1(spec).verdict is Verdict.HOLDS


class TestLyapunov:
    def test_unit_innovation_exact(self, explosive_season_unit):
        est = estimate_lyapunov(explosive_season_unit, years=500, reps=4, seed=3)
        assert est.gamma_hat == pytest.approx(math.log(0.6), abs=1e-12)
        assert est.std_error == 0.0
        assert est.per_observation == pytest.approx(math.log(0.6) / 2, abs=1e-12)

    def test_matches_log_moment(self):
        spec = garch11(0.1, 0.3, 0.6)
        est = estimate_lyapunov(spec, years=4000, reps=16, seed=1)
        target, _ = log_moment(gaussian(), 0.3, 0.6)
        assert abs(est.gamma_hat - target) < 3 * est.std_error

    def test_seasonal_and_stacked_agree(self, two_season):
        a = estimate_lyapunov(two_season, years=2000, reps=8, seed=2, mode="seasonal")
        b = estimate_lyapunov(two_season, years=2000, reps=8, seed=2, mode="stacked")
        assert abs(a.gamma_hat - b.gamma_hat) < 3 * math.hypot(a.std_error, b.std_error)

    def test_bit_identical_across_workers(self, two_season):
        a = estimate_lyapunov(two_season, years=300, reps=40, seed=5, workers=1)
        b = estimate_lyapunov(two_season, years=300, reps=40, seed=5, workers=4)
        assert a == b

    def test_seed_changes_result(self, two_season):
        a = estimate_lyapunov(two_season, years=300, reps=4, seed=5)
        b = estimate_lyapunov(two_season, years=300, reps=4, seed=6)
        assert a.gamma_hat != b.gamma_hat

    def test_year_blocks_do_not_matter(self, two_season, monkeypatch):
        import pgarch.certify as certify

        a = estimate_lyapunov(two_season, years=300, reps=3, seed=8)
        monkeypatch.setattr(certify, "_YEAR_BLOCK", 7)
        b = estimate_lyapunov(two_season, years=300, reps=3, seed=8)
        assert a == b

    def test_se_is_sd_over_root_reps(self, two_season):
        est = estimate_lyapunov(two_season, years=200, reps=6, seed=1)
        per = np.array(est.per_rep)
        assert est.std_error == pytest.approx(per.std(ddof=1) / math.sqrt(6))
        assert est.gamma_hat == pytest.approx(per.mean())

    def test_manual_product_oracle(self, two_season):
        # one replication recomputed with plain matrix products
        years, warm = 150, 10
        est = estimate_lyapunov(two_season, years=years, reps=2, seed=4, warmup=warm)
        eps = innovations(gaussian(), 4, 1, 0, 0, (years + warm) * 2).reshape(-1, 2)
        blocks = season_blocks(two_season)
        M, acc = np.eye(2), 0.0
        for t, (e1, e2) in enumerate(eps):
            M = blocks[1].phi(e2**2) @ blocks[0].phi(e1**2) @ M
            norm = np.abs(M).sum(axis=1).max()
            if t >= warm:
                acc += math.log(norm)
            M = M / norm
        assert est.per_rep[0] == pytest.approx(acc / years, rel=1e-12)

    def test_degenerate_product(self):
        spec = garch11([0.1, 0.2], [0.0, 0.3], [0.0, 0.4])
        est = estimate_lyapunov(spec, years=100, reps=2)
        assert est.degenerate and est.gamma_hat == -math.inf
        assert lyapunov_certificate(est).verdict is Verdict.HOLDS

    def test_certificate(self, running):
        cert = lyapunov_certificate(estimate_lyapunov(running, years=500, reps=4))
        assert cert.verdict is Verdict.HOLDS
        assert {"gamma_hat", "std_error", "gamma_per_observation"} <= set(cert.evidence)

    @pytest.mark.parametrize("kw", [dict(years=99), dict(reps=1), dict(mode="diag")])
    def test_argument_checks(self, running, kw):
        args = dict(years=200, reps=2)
        args.update(kw)
        with pytest.raises(ValueError):
            estimate_lyapunov(running, **args)


class TestLogMoment:
    def test_chi2_identity(self):
        value, err = log_moment(gaussian(), 1.0, 0.0)
        assert value == pytest.approx(-EULER_LOG2, abs=1e-14)
        assert value == pytest.approx(special.digamma(0.5) + math.log(2), abs=1e-14)

    def test_chi2_monte_carlo(self):
        eps = innovations(gaussian(), 0, 9, 0, 0, 2_000_000)
        sample = np.log(eps**2)
        assert abs(sample.mean() + EULER_LOG2) < 4 * sample.std() / math.sqrt(sample.size)

    @pytest.mark.parametrize("a, b", [(0.2, 0.7), (0.3, 0.6), (1.1, 0.05), (0.1, 0.3), (2.0, 1e-3)])
    def test_gaussian_against_monte_carlo(self, a, b):
        eps = innovations(gaussian(), 1, 9, 0, 0, 1_000_000)
        sample = np.log(a * eps**2 + b)
        value, _ = log_moment(gaussian(), a, b)
        assert abs(sample.mean() - value) < 4 * sample.std() / math.sqrt(sample.size)

    def test_smooth_case_agrees_with_hermite(self):
        z, w = hermegauss(128)
        gh = float(np.sum(w * np.log(0.2 * z**2 + 0.7)) / np.sum(w))
        assert log_moment(gaussian(), 0.2, 0.7)[0] == pytest.approx(gh, abs=1e-9)

    @pytest.mark.parametrize("nu", [5.0, 8.0, 20.0])
    def test_student_t_zero_beta_closed_form_vs_quadrature(self, nu):
        exact, _ = log_moment(student_t(nu), 1.0, 0.0)
        near, _ = log_moment(student_t(nu), 1.0, 1e-12)
        assert near == pytest.approx(exact, abs=1e-5)

    def test_student_t_monte_carlo(self):
        dist = student_t(6.0)
        eps = innovations(dist, 2, 9, 0, 0, 1_000_000)
        sample = np.log(0.4 * eps**2 + 0.5)
        value, _ = log_moment(dist, 0.4, 0.5)
        assert abs(sample.mean() - value) < 4 * sample.std() / math.sqrt(sample.size)

    def test_shift_property(self):
        assert log_moment(gaussian(), 4.0, 0.0)[0] == pytest.approx(math.log(4) - EULER_LOG2, abs=1e-12)

    def test_degenerate_cases(self):
        assert log_moment(gaussian(), 0.0, 0.0)[0] == -math.inf
        assert log_moment(gaussian(), 0.0, 0.5)[0] == pytest.approx(math.log(0.5))
        assert log_moment(unit(), 0.3, 0.4)[0] == pytest.approx(math.log(0.7))


class TestGarch11Strict:
    def test_unit(self):
        cert = garch11_strict_condition(garch11([0.1, 0.2], [0.6, 0.25], [0.6, 0.25], unit()))
        assert cert.evidence["S"] == pytest.approx(math.log(0.6), abs=1e-14)
        assert cert.verdict is Verdict.HOLDS

    def test_chi2(self):
        cert = garch11_strict_condition(garch11(0.1, 1.0, 0.0))
        assert cert.evidence["S"] == pytest.approx(-1.2703628454614782, abs=1e-10)
        assert cert.verdict is Verdict.HOLDS

    def test_fails(self):
        cert = garch11_strict_condition(garch11(0.1, 4.0, 0.0))
        assert cert.evidence["S"] == pytest.approx(0.1159315, abs=1e-6)
        assert cert.verdict is Verdict.FAILS

    def test_zero_season_gives_minus_infinity(self):
        cert = garch11_strict_condition(garch11([0.1, 0.1], [0.0, 5.0], [0.0, 5.0]))
        assert cert.evidence["S"] == -math.inf and cert.verdict is Verdict.HOLDS

    def test_pure_arch1_is_allowed(self):
        spec = ModelSpec(1, 1, 0, [0.1], [[1.0]], np.zeros((1, 0)))
        assert garch11_strict_condition(spec).evidence["S"] == pytest.approx(-EULER_LOG2)

    def test_not_garch11(self):
        with pytest.raises(NotGarch11):
            garch11_strict_condition(ModelSpec(1, 2, 1, [0.1], [[0.1, 0.1]], [[0.5]]))


class TestErgodicity:
    def test_running_example_holds(self, running):
        cert = check_ergodicity(running, mc_draws=50_000)
        assert cert.verdict is Verdict.HOLDS
        assert cert.evidence["rho_B"] == pytest.approx(0.7)
        # rank-one case: the weighted norm of A(eta) is 0.2 eta + 0.7, mean 0.9
        assert cert.evidence["E_norm_pow_1"] == pytest.approx(0.9, abs=4 * cert.evidence["se_1"])

    def test_unit_refused(self, explosive_season_unit):
        with pytest.raises(InnovationNotAbsolutelyContinuous):
            check_ergodicity(explosive_season_unit)

    def test_l1_gate(self):
        cert = check_ergodicity(garch11(0.1, 0.6, 0.6), mc_draws=1000)
        assert cert.verdict is Verdict.FAILS
        assert any("L1" in n for n in cert.notes)

    def test_rho_b_is_garch_block_radius(self):
        spec = garch11([0.1, 0.1], [0.01, 0.01], [1.1, 0.5])
        assert check_L1(spec).verdict is Verdict.HOLDS
        cert = check_ergodicity(spec, mc_draws=1000)
        assert cert.evidence["rho_B"] == pytest.approx(0.55)

    def test_rho_b_never_exceeds_l1_radius(self):
        # the GARCH block of the nonnegative seasonal product dominates the product of blocks
        rng = np.random.default_rng(12)
        for _ in range(20):
            spec = random_spec(rng, scale=0.9)
            cert = check_ergodicity(spec, mc_draws=500)
            assert cert.evidence["rho_B"] <= cert.evidence["rho_L1"] * (1 + 1e-9)

    def test_weights(self, two_season):
        w, lam = ergodicity_weights(two_season)
        A = build_companion(two_season).A_mean
        assert np.all(w > 0) and lam < 1
        assert np.all(w @ A <= lam * w + 1e-12)

    def test_weighted_norm_is_induced(self, two_season):
        # max_j (w'|A|)_j / w_j equals the l1_w operator norm: attained at a basis vector
        from pgarch.certify import _weighted_norms

        w, _ = ergodicity_weights(two_season)
        blocks = season_blocks(two_season)
        eta = np.array([[0.3, 2.5]])
        norm = _weighted_norms(blocks, w, eta)[0]
        A = stacked_matrix(blocks, eta[0])
        ratios = [w @ np.abs(A[:, j]) / w[j] for j in range(A.shape[1])]
        assert norm == pytest.approx(max(ratios))
        rng = np.random.default_rng(0)
        for z in rng.normal(size=(50, 4)):
            assert w @ np.abs(A @ z) <= norm * (w @ np.abs(z)) * (1 + 1e-12)

    def test_reproducible_across_workers(self, two_season):
        a = check_ergodicity(two_season, mc_draws=70_000, seed=3, workers=1)
        b = check_ergodicity(two_season, mc_draws=70_000, seed=3, workers=3)
        assert a.to_dict() == b.to_dict()

    def test_r_grid_validation(self, running):
        with pytest.raises(ValueError):
            check_ergodicity(running, r_grid=(2.0,), mc_draws=200)
