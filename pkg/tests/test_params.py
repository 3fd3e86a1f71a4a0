import math
from dataclasses import replace

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import stackgame as sg
from stackgame.params import set_by_path


def spec(h, alpha, eta):
    return sg.DelaySpec(h=h, alpha=alpha, eta=eta)


class TestDeriveDelayCoefficients:
    def test_insurer1_values(self):
        co = sg.derive_delay_coefficients(spec(2.0, 0.5, 0.05), r0=0.05)
        assert co.A == pytest.approx(0.00391, abs=5e-6)
        assert co.A + 0.05 == pytest.approx(0.05391, abs=5e-6)
        for r in co.residuals(spec(2.0, 0.5, 0.05), 0.05):
            assert abs(r) < 1e-12 * max(abs(co.A), abs(co.B), abs(co.C), 0.05)

    def test_vanishing_weight_recovers_no_delay(self):
        co = sg.derive_delay_coefficients(spec(2.0, 0.5, 1e-12), r0=0.05)
        assert co.A == pytest.approx(0.05, abs=1e-11)
        assert 0.0 <= co.B < 1e-11
        assert 0.0 <= co.C < 1e-11

    def test_reinsurer_constraints(self):
        s = spec(2.0, 0.3, 0.05)
        co = sg.derive_delay_coefficients(s, r0=0.05)
        decay = math.exp(-0.6)
        assert co.C == pytest.approx(0.05 * decay, rel=1e-14)
        assert co.B * decay == pytest.approx((0.3 + co.A + 0.05) * co.C, rel=1e-12)

    def test_zero_delay(self):
        co = sg.derive_delay_coefficients(sg.NO_DELAY, r0=0.07)
        assert (co.A, co.B, co.C) == (0.07, 0.0, 0.0)

    def test_rejects_invalid(self):
        with pytest.raises(sg.ParameterError):
            sg.derive_delay_coefficients(spec(-1.0, 0.5, 0.05), r0=0.05)
        with pytest.raises(sg.ParameterError):
            sg.derive_delay_coefficients(spec(1.0, 0.5, None), r0=0.05)

    @given(
        h=st.floats(0.1, 6.0),
        alpha=st.floats(0.05, 1.5),
        eta=st.floats(1e-4, 0.99),
        r0=st.floats(0.005, 0.15),
    )
    @settings(max_examples=200, deadline=None)
    def test_constraints_hold_everywhere(self, h, alpha, eta, r0):
        s = spec(h, alpha, eta)
        co = sg.derive_delay_coefficients(s, r0)
        scale = max(abs(co.A), abs(co.B), abs(co.C), r0)
        assert all(abs(r) <= 1e-12 * scale for r in co.residuals(s, r0))
        assert co.B >= 0.0 and co.C >= 0.0


class TestDeriveEta2:
    def test_paper_inputs(self):
        eta2 = sg.derive_eta2(spec(2.0, 0.5, 0.05), h2=3.0, alpha2=0.3, r0=0.05)
        assert eta2 == pytest.approx(0.0163, abs=5e-5)

    def test_symmetric_inputs(self):
        eta2 = sg.derive_eta2(spec(2.0, 0.5, 0.05), h2=2.0, alpha2=0.5, r0=0.05)
        assert eta2 == pytest.approx(0.05, rel=1e-14)

    def test_out_of_range(self):
        # short window with large averaging flips the matching weight's sign
        with pytest.raises(sg.EtaOutOfRange):
            sg.derive_eta2(spec(2.0, 0.5, 0.05), h2=0.3, alpha2=0.5, r0=0.05)

    @given(
        h1=st.floats(0.5, 4.0),
        a1=st.floats(0.15, 0.8),
        e1=st.floats(0.01, 0.4),
        h2=st.floats(0.5, 4.0),
        a2=st.floats(0.15, 0.8),
        r0=st.floats(0.01, 0.1),
    )
    @settings(max_examples=200, deadline=None)
    def test_rate_matching_roundtrip(self, h1, a1, e1, h2, a2, r0):
        d1 = spec(h1, a1, e1)
        try:
            eta2 = sg.derive_eta2(d1, h2, a2, r0)
        except sg.EtaOutOfRange:
            return
        d2 = spec(h2, a2, eta2)
        r1 = sg.derive_delay_coefficients(d1, r0).A + e1
        r2 = sg.derive_delay_coefficients(d2, r0).A + eta2
        assert abs(r1 - r2) <= 1e-10 * max(abs(r1), abs(r2))


class TestPremiumBounds:
    def test_defaults(self, default_config):
        assert sg.premium_bounds(default_config.claims) == (8.8, 12.0)

    def test_permutation_covariant(self, default_config):
        cl = default_config.claims
        swapped = replace(
            cl, a1=cl.a2, a2=cl.a1, sigma1=cl.sigma2, sigma2=cl.sigma1,
            theta1=cl.theta2, theta2=cl.theta1,
        )
        assert sg.premium_bounds(swapped) == sg.premium_bounds(cl)

    def test_limiting_band(self):
        eps = 1e-4
        cl = sg.ClaimModel(a1=4.0, a2=4.0, sigma1=3.0, sigma2=2.0,
                           theta1=2.0 - eps, theta2=2.0 - eps, rho=0.3,
                           theta_bar=2.0)
        c_F, c_bar = sg.premium_bounds(cl)
        assert c_bar - c_F == pytest.approx(4.0 * eps, rel=1e-9)

    def test_degenerate_band(self):
        cl = sg.ClaimModel(a1=4.0, a2=4.0, sigma1=3.0, sigma2=2.0,
                           theta1=1.2, theta2=1.0, rho=0.3, theta_bar=0.5)
        with pytest.raises(sg.DegenerateBand):
            sg.premium_bounds(cl)


class TestValidate:
    def test_defaults_accepted(self, default_config):
        cfg = default_config
        assert cfg.config.delay_2.eta == pytest.approx(0.0163264, abs=1e-6)
        assert cfg.rate_F == pytest.approx(cfg.coeffs_2.A + cfg.config.delay_2.eta,
                                           rel=1e-10)

    def test_competition_boundary_rejected(self, default_config):
        bad = replace(
            default_config.config,
            prefs=replace(default_config.prefs, k1=1.0, k2=1.0),
            claims=replace(default_config.claims, rho=1.0),
        )
        with pytest.raises(sg.ValidationError) as exc:
            sg.validate(bad)
        assert any("k1*k2*rho^2" in line for line in exc.value.report)

    def test_rate_mismatch_reported_with_magnitude(self, default_config):
        cfg = default_config.config
        bad = replace(cfg, delay_2=replace(cfg.delay_2,
                                           eta=cfg.delay_2.eta + 1e-3))
        with pytest.raises(sg.ValidationError) as exc:
            sg.validate(bad)
        assert "mismatch" in str(exc.value)

    def test_negative_rho_unsupported(self, default_config):
        bad = replace(default_config.config,
                      claims=replace(default_config.claims, rho=-0.2))
        with pytest.raises(sg.ValidationError) as exc:
            sg.validate(bad)
        assert any("rho < 0" in line for line in exc.value.report)

    def test_report_collects_all_failures(self, default_config):
        cfg = default_config.config
        bad = replace(
            cfg,
            market=replace(cfg.market, sigma=-1.0),
            prefs=replace(cfg.prefs, gamma_L=-2.0),
        )
        with pytest.raises(sg.ValidationError) as exc:
            sg.validate(bad)
        assert len(exc.value.report) >= 2


class TestScenarioFile:
    def test_load_defaults(self, scenario_path):
        cfg = sg.load_scenario_file(scenario_path)
        assert cfg.market.T == 10.0
        assert cfg.claims.a1 == 4.0
        assert cfg.delay_2.eta is None

    def test_unknown_key_rejected(self, scenario_path):
        text = scenario_path.read_text().replace(
            "[market]\n", "[market]\nbogus = 1\n", 1
        )
        with pytest.raises(sg.ParameterError, match="bogus"):
            sg.load_scenario(text)

    def test_missing_section_rejected(self, scenario_path):
        text = scenario_path.read_text().replace("[insurer2]", "[market2]")
        with pytest.raises(sg.ParameterError):
            sg.load_scenario(text)

    def test_raw_poisson_form(self):
        cl = sg.ClaimModel.from_poisson(
            lambda1=0.5, mu1=5.0, m2_1=11.25,
            lambda2=0.7, mu2=4.0, m2_2=13.0 + 1.0 / 3.0,
            lambda_common=0.3, theta1=1.2, theta2=1.0, theta_bar=2.0,
        )
        assert cl.a1 == pytest.approx(0.8 * 5.0)
        assert cl.a2 == pytest.approx(1.0 * 4.0)
        assert cl.sigma1 == pytest.approx(3.0)
        assert cl.rho == pytest.approx(0.3 * 5.0 * 4.0 / (cl.sigma1 * cl.sigma2))


class TestSetByPath:
    def test_unknown_path(self, default_config):
        with pytest.raises(sg.ParameterError):
            set_by_path(default_config.config, "prefs.nope", 1.0)

    def test_delay1_change_rederives_eta2(self, default_config):
        cfg = set_by_path(default_config.config, "delay_1.h", 3.0)
        assert cfg.delay_2.eta is None
        checked = sg.validate(cfg)
        assert checked.config.delay_2.eta != default_config.config.delay_2.eta

    def test_delay2_change_rederives_eta1(self, default_config):
        cfg = set_by_path(default_config.config, "delay_2.h", 2.0)
        assert cfg.delay_2.eta == default_config.config.delay_2.eta
        checked = sg.validate(cfg)
        assert checked.config.delay_1.eta != 0.05

    def test_top_level(self, default_config):
        cfg = set_by_path(default_config.config, "x_L0", 25.0)
        assert cfg.x_L0 == 25.0
