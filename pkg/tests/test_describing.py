import math

import numpy as np
import pytest

from crawlerlab.describing import (AlphaEta, FrictionRelay, RelaySpec,
                                   alpha_eta, average_power,
                                   friction_relay_fundamental, g_residual,
                                   hb_vs_simulation, instantaneous_power,
                                   optimize, relay_from_groups,
                                   relay_voltage_fundamental,
                                   simulate_relay_loop, solve_balance,
                                   solve_fixed_Z, speed_ratio, z_sweep)
from crawlerlab.dynamics import friction_limit_forward
from crawlerlab.errors import (InfeasibleRelayError, InvalidParameterError,
                               NoSwitchingError, SaturatedInputError)
from crawlerlab.params import Groups

from oracles import friction_relay_fourier, hysteretic_relay_fourier

M_REF = 2.0


def test_relay_spec_validation():
    with pytest.raises(InvalidParameterError):
        RelaySpec(M=0.0, beta=1.0)
    with pytest.raises(InvalidParameterError):
        RelaySpec(M=1.0, beta=-0.5)


def test_relay_voltage_matching_case():
    V0, V_sin, V_cos = relay_voltage_fundamental(0.7, RelaySpec(M_REF, 0.7))
    assert V0 == 0.0
    assert V_sin == 0.0
    assert math.isclose(V_cos, 4.0 * M_REF / math.pi, rel_tol=1e-14)


def test_relay_voltage_small_threshold_limit():
    V0, V_sin, V_cos = relay_voltage_fundamental(1.0, RelaySpec(M_REF, 1e-9))
    assert V0 == 0.0
    assert math.isclose(V_sin, -4.0 * M_REF / math.pi, rel_tol=1e-9)
    assert abs(V_cos) < 1e-8


def test_relay_voltage_requires_switching():
    with pytest.raises(NoSwitchingError):
        relay_voltage_fundamental(0.5, RelaySpec(M_REF, 0.7))


def test_relay_voltage_against_fourier_oracle():
    rng = np.random.default_rng(31)
    for _ in range(50):
        S = rng.uniform(0.2, 3.0)
        beta = S * rng.uniform(0.05, 0.98)
        M = rng.uniform(0.5, 4.0)
        mean, c1, s1 = hysteretic_relay_fourier(S, beta, M)
        V0, V_sin, V_cos = relay_voltage_fundamental(S, RelaySpec(M, beta))
        assert abs(mean - V0) < 1e-8
        assert abs(s1 - V_sin) < 1e-8
        assert abs(c1 - V_cos) < 1e-8


def test_friction_relay_saturated_limit():
    delta = 0.3
    sigma0, s_sin, s_cos = friction_relay_fundamental(1.0 - 1e-12, delta, 0.4)
    assert math.isclose(sigma0, 2.0 * delta, rel_tol=1e-5)
    assert abs(s_sin) < 1e-5 and abs(s_cos) < 1e-5


def test_friction_relay_dc_balance_at_speed_ratio():
    delta = friction_limit_forward(1.5)
    a = speed_ratio(delta)
    sigma0, _, _ = friction_relay_fundamental(a, delta, 0.0)
    assert abs(sigma0) < 1e-14


def test_friction_relay_rejects_saturation():
    with pytest.raises(SaturatedInputError):
        friction_relay_fundamental(1.0, 0.3, 0.0)
    with pytest.raises(SaturatedInputError):
        friction_relay_fundamental(-1.2, 0.3, 0.0)


def test_friction_relay_against_fourier_oracle():
    rng = np.random.default_rng(33)
    for _ in range(50):
        a = rng.uniform(-0.95, 0.95)
        delta = rng.uniform(0.02, 0.9)
        phi = rng.uniform(-math.pi, math.pi)
        mean, c1, s1 = friction_relay_fourier(a, delta, phi)
        sigma0, s_sin, s_cos = friction_relay_fundamental(a, delta, phi)
        assert abs(mean - 0.5 * sigma0) < 1e-8
        assert abs(c1 - s_cos) < 1e-8
        assert abs(s1 - s_sin) < 1e-8


def test_g_residual_root_and_limits(relay_groups):
    ae = alpha_eta(relay_groups, M_REF)
    zeta = relay_groups.zeta
    S_star = (ae.alpha - ae.eta) / (2.0 * zeta)
    assert abs(g_residual(S_star, 1.0, ae, zeta)) < 1e-12
    assert g_residual(1e-9, 0.5, ae, zeta) < -1e6
    assert g_residual(1e9, 0.5, ae, zeta) > 1e8


def test_fixed_Z_root_unique_and_cross_checked():
    """Bisection+Newton root equals both the closed quadratic form and an
    independently seeded Newton iteration."""
    rng = np.random.default_rng(35)
    for _ in range(100):
        alpha = rng.uniform(0.5, 5.0)
        eta = alpha * rng.uniform(0.05, 0.95)
        ae = AlphaEta(alpha=alpha, eta=eta)
        zeta = rng.uniform(0.2, 4.0)
        Z = rng.uniform(0.01, 1.0)
        S = solve_fixed_Z(Z, ae, zeta)
        b = alpha * math.sqrt(1.0 - Z * Z)
        c = ((alpha * Z - eta) / (2.0 * zeta)) ** 2
        S_quad = 0.5 * (-b + math.sqrt(b * b + 4.0 * c))
        assert math.isclose(S, S_quad, rel_tol=1e-12, abs_tol=1e-15)
        S_newton = max(S * rng.uniform(1.5, 3.0), 1e-3)
        for _ in range(200):
            slope = 1.0 + (alpha * Z - eta) ** 2 / (4 * zeta ** 2 *
                                                    S_newton ** 2)
            step = g_residual(S_newton, Z, ae, zeta) / slope
            # guarded: the residual is only defined for positive amplitudes
            while S_newton - step <= 0.0:
                step *= 0.5
            S_newton -= step
        assert math.isclose(S, S_newton, rel_tol=1e-12, abs_tol=1e-12)


def test_solve_balance_matched_threshold_is_resonant(relay_groups):
    opt = optimize(relay_groups, M_REF)
    hb = solve_balance(RelaySpec(M_REF, opt.beta_star), relay_groups)
    assert math.isclose(hb.omega, 1.0, rel_tol=1e-10)
    assert math.isclose(hb.S, opt.S_star, rel_tol=1e-10)
    assert hb.phi1 == math.pi and hb.phi2 == 0.0
    assert math.isclose(hb.v_tilde, hb.omega * hb.S / 2.0, rel_tol=1e-14)
    assert math.isclose(hb.v_bar, hb.a * hb.v_tilde, rel_tol=1e-14)


def test_solve_balance_reference_threshold(relay_groups):
    hb = solve_balance(RelaySpec(M_REF, 0.5125), relay_groups)
    assert math.isclose(hb.S, 0.5125, rel_tol=1e-3)
    assert math.isclose(hb.omega, 1.0, rel_tol=1e-2)


def test_solve_balance_residuals(relay_groups):
    g = relay_groups
    ae = alpha_eta(g, M_REF)
    delta = friction_limit_forward(g.n_f)
    a = speed_ratio(delta)
    for beta in (0.2, 0.35, 0.5):
        hb = solve_balance(RelaySpec(M_REF, beta), g)
        # strain-rate identity
        assert abs(hb.v_tilde - hb.omega * hb.S / 2.0) < 1e-10
        # cosine balance: -2 zeta S w + alpha beta / S - eta = 0
        r2 = (-2.0 * g.zeta * hb.S * hb.omega + ae.alpha * beta / hb.S
              - ae.eta)
        assert abs(r2) < 1e-10
        # sine balance: alpha sqrt(1 - (beta/S)^2) + S (1 - w^2) = 0
        r3 = (ae.alpha * math.sqrt(1.0 - (beta / hb.S) ** 2)
              + hb.S * (1.0 - hb.omega ** 2))
        assert abs(r3) < 1e-10
        assert math.isclose(hb.a, a, rel_tol=1e-14)


def test_solve_balance_infeasible_threshold(relay_groups):
    opt = optimize(relay_groups, M_REF)
    with pytest.raises(InfeasibleRelayError):
        solve_balance(RelaySpec(M_REF, 1.1 * opt.S_star), relay_groups)


def test_solve_balance_requires_feasible_constants(relay_groups):
    with pytest.raises(InfeasibleRelayError):
        solve_balance(RelaySpec(0.05, 0.01), relay_groups)   # alpha < eta


def test_optimize_reference_values(relay_groups):
    opt = optimize(relay_groups, M_REF)
    assert math.isclose(opt.alpha, 8.0 * 0.5 * M_REF / math.pi,
                        rel_tol=1e-14)
    assert math.isclose(opt.Delta, friction_limit_forward(1.5),
                        rel_tol=1e-14)
    assert 0.505 <= opt.S_star <= 0.520
    assert opt.Z_star == 1.0 and opt.omega_star == 1.0
    assert opt.beta_star == opt.S_star
    assert math.isclose(opt.v_com_bar_star, 0.2535, rel_tol=2e-3)
    assert math.isclose(
        opt.P_bar_star,
        average_power(1.0, alpha_eta(relay_groups, M_REF), 2.0, M_REF),
        rel_tol=1e-14)


def test_optimize_rejects_weak_actuation(relay_groups):
    with pytest.raises(InfeasibleRelayError):
        optimize(relay_groups, 0.05)


def test_z_sweep_argmax_at_matched_threshold(relay_groups):
    rows = z_sweep(relay_groups, M_REF, [0.05 * k for k in range(1, 21)])
    best = max(rows, key=lambda r: r.v_com_bar)
    assert best.Z == 1.0
    assert max(rows, key=lambda r: r.P_bar).Z == 1.0
    assert all(r.v_com_bar < best.v_com_bar for r in rows[:-1])
    assert abs(rows[-1].phi_rel) < 1e-12
    ae = alpha_eta(relay_groups, M_REF)
    for r in rows:
        assert abs(r.P_bar - average_power(r.Z, ae, 2.0, M_REF)) < 1e-10
        if r.feasible:
            assert math.isclose(r.beta, r.Z * r.S, rel_tol=1e-9)


def test_z_sweep_argmax_invariant_under_relay_scaling(relay_groups):
    for M in (M_REF, 3.0 * M_REF):
        rows = z_sweep(relay_groups, M, [0.1 * k for k in range(1, 11)])
        assert max(rows, key=lambda r: r.v_com_bar).Z == 1.0


def test_power_nonnegative_at_matched_threshold(relay_groups):
    opt = optimize(relay_groups, M_REF)
    hb = solve_balance(RelaySpec(M_REF, opt.beta_star), relay_groups)
    t = np.linspace(0.0, 2.0 * math.pi / hb.omega, 1000)
    P = instantaneous_power(t, hb, RelaySpec(M_REF, opt.beta_star))
    assert P.min() >= -1e-12
    # average of the sampled signal matches the closed form
    from scipy.integrate import simpson
    P_bar = simpson(P, x=t) / (2.0 * math.pi / hb.omega)
    assert abs(P_bar - hb.P_bar) < 1e-10
    # the power signal oscillates at twice the state frequency
    period = 2.0 * math.pi / hb.omega
    P_pair = instantaneous_power(np.array([0.0, period / 2.0]), hb,
                                 RelaySpec(M_REF, opt.beta_star))
    assert math.isclose(P_pair[0], P_pair[1], rel_tol=1e-10)


def test_average_power_zero_at_eta_over_alpha(relay_groups):
    ae = alpha_eta(relay_groups, M_REF)
    assert average_power(ae.eta / ae.alpha, ae, 2.0, M_REF) == 0.0


def test_friction_relay_from_anisotropy():
    fr = FrictionRelay.from_anisotropy(1.5)
    assert math.isclose(fr.Delta, friction_limit_forward(1.5), rel_tol=1e-14)
    assert math.isclose(fr.a, math.cos(math.pi * fr.Delta / (1 + fr.Delta)),
                        rel_tol=1e-14)
    assert 0.0 < fr.Delta < 1.0 and 0.0 < fr.a < 1.0


def test_relay_from_groups_identification(stiff_groups):
    r = relay_from_groups(stiff_groups)
    assert math.isclose(r.M, math.sqrt(2.0), rel_tol=1e-12)
    expected_beta = (2.0 * stiff_groups.pi_l ** 1.5
                     / (3.0 * math.sqrt(3.0)
                        * math.sqrt(stiff_groups.pi_c) * stiff_groups.pi_s))
    assert math.isclose(r.beta, expected_beta, rel_tol=1e-12)


def test_relay_simulation_reaches_cycle(relay_groups):
    opt = optimize(relay_groups, M_REF)
    cmp_ = hb_vs_simulation(relay_groups, RelaySpec(M_REF, opt.beta_star),
                            n_cycles=12, settle_cycles=8)
    assert cmp_.switched
    assert cmp_.dev_S < 0.15
    assert cmp_.sim_omega > 0.0


def test_relay_magnitude_scaling_tracked_by_simulation(relay_groups):
    """Doubling the relay magnitude scales alpha and the matched amplitude
    per the closed form; the simulated amplitude follows within 10%."""
    ae1 = alpha_eta(relay_groups, M_REF)
    ae2 = alpha_eta(relay_groups, 2.0 * M_REF)
    assert math.isclose(ae2.alpha, 2.0 * ae1.alpha, rel_tol=1e-14)
    opt2 = optimize(relay_groups, 2.0 * M_REF)
    expected = (ae2.alpha - ae2.eta) / (2.0 * relay_groups.zeta)
    assert math.isclose(opt2.S_star, expected, rel_tol=1e-14)
    cmp_ = hb_vs_simulation(relay_groups, RelaySpec(2.0 * M_REF,
                                                   opt2.beta_star),
                            n_cycles=12, settle_cycles=8)
    assert cmp_.switched
    assert cmp_.dev_S < 0.10


def test_relay_simulation_no_switching_report(relay_groups):
    # threshold far above any reachable strain: harmonic balance is
    # infeasible and the raw simulation never fires the relay
    traj = simulate_relay_loop(relay_groups, RelaySpec(M_REF, 50.0), 30.0,
                               x0=[0.0, 0.0, 0.2, 0.0])
    assert not traj.switched


def test_isotropic_friction_produces_no_net_motion():
    iso = Groups(zeta=0.3, pi_f=1.0, pi_V=0.5, pi_eps=1.0, n_f=0.0,
                 pi_c=1.0, pi_l=1.0, pi_s=1.0)
    traj = simulate_relay_loop(iso, RelaySpec(M=5.0, beta=0.3), 200.0,
                               x0=[0.0, 0.0, 1.0, 0.0], max_step=0.2)
    assert traj.switched and len(traj.switch_times) > 50
    t = traj.times
    i0 = int(np.searchsorted(t, 80.0))
    v_bar = (traj.states[-1, 3] - traj.states[i0, 3]) / (t[-1] - t[i0])
    s_amp = 0.5 * (traj.states[t >= 80.0, 1].max()
                   - traj.states[t >= 80.0, 1].min())
    assert s_amp > 0.1            # it genuinely oscillates
    assert abs(v_bar) < 1e-6 * max(s_amp, 1.0)
    # anisotropy restores rectified motion
    aniso = Groups(zeta=0.3, pi_f=1.0, pi_V=0.5, pi_eps=1.0, n_f=1.5,
                   pi_c=1.0, pi_l=1.0, pi_s=1.0)
    traj2 = simulate_relay_loop(aniso, RelaySpec(M=5.0, beta=0.3), 200.0,
                                x0=[0.0, 0.0, 1.0, 0.0], max_step=0.2)
    t2 = traj2.times
    i0 = int(np.searchsorted(t2, 80.0))
    v_bar2 = (traj2.states[-1, 3] - traj2.states[i0, 3]) / (t2[-1] - t2[i0])
    assert v_bar2 > 0.1
