import math
from dataclasses import fields

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from crawlerlab.dynamics import vector_field, vector_field_dimensional
from crawlerlab.errors import ConfigError, InvalidParameterError
from crawlerlab.params import (DimensionalParams, Groups,
                               characteristic_scales, groups_from_mapping,
                               load_groups, nondimensionalize)


def make_params(**over):
    base = dict(m=0.02, ell=0.1, k=5.0, b=0.05, A_sigma=0.8, k_v=0.4,
                c=1e-6, kappa=10.0, rho=0.1, gamma_p=0.1, eps_f=0.005,
                n_f=0.7)
    base.update(over)
    return DimensionalParams(**base)


def test_scales_omega_n():
    sc = characteristic_scales(make_params(m=2.0, k=1.0))
    assert sc.omega_n == 1.0
    assert sc.t_star == 1.0
    sc = characteristic_scales(make_params(m=0.5, k=1.0))
    assert sc.omega_n == 2.0
    assert sc.t_star == 0.5


def test_voltage_scale():
    # t_star = 0.1 needs 2k/m = 100
    sc = characteristic_scales(make_params(m=0.02, k=1.0, c=1e-6, kappa=10.0))
    assert math.isclose(sc.t_star, 0.1)
    assert math.isclose(sc.V_star, 0.1, rel_tol=1e-12)


def test_scales_identity_fields():
    p = make_params()
    sc = characteristic_scales(p)
    assert sc.l_star == p.ell
    assert sc.m_star == 2.0 * p.m
    assert math.isclose(sc.t_star * sc.omega_n, 1.0)


def test_invalid_dimensional_params():
    with pytest.raises(InvalidParameterError):
        make_params(m=0.0)
    with pytest.raises(InvalidParameterError):
        make_params(kappa=-1.0)
    with pytest.raises(InvalidParameterError):
        make_params(b=-0.1)
    make_params(b=0.0, n_f=0.0)  # boundary values allowed


def test_group_formulas():
    p = make_params(b=0.0)
    sc = characteristic_scales(p)
    g = nondimensionalize(p, sc)
    assert g.zeta == 0.0
    p2 = make_params(A_sigma=2.0 * p.k * p.ell)
    g2 = nondimensionalize(p2, characteristic_scales(p2))
    assert math.isclose(g2.pi_f, 1.0, rel_tol=1e-14)
    assert g.n_f == p.n_f


def test_all_eight_groups_present():
    names = {f.name for f in fields(Groups)}
    assert names == {"zeta", "pi_f", "pi_V", "pi_eps", "n_f", "pi_c",
                     "pi_l", "pi_s", "eps"}
    g = nondimensionalize(make_params(), characteristic_scales(make_params()))
    assert g.pi_c_eps == g.eps * g.pi_c
    assert g.pi_l_eps == g.eps * g.pi_l
    assert g.pi_s_eps == g.eps * g.pi_s


@settings(max_examples=50, deadline=None)
@given(mu_m=st.floats(0.1, 10), mu_l=st.floats(0.1, 10),
       mu_t=st.floats(0.1, 10), mu_i=st.floats(0.1, 10))
def test_dimensional_homogeneity(mu_m, mu_l, mu_t, mu_i):
    """The groups are invariant under consistent changes of base units."""
    p = make_params()
    scaled = DimensionalParams(
        m=p.m * mu_m,
        ell=p.ell * mu_l,
        k=p.k * mu_m / mu_t ** 2,
        b=p.b * mu_m / mu_t,
        A_sigma=p.A_sigma * mu_m * mu_l / mu_t ** 2,
        k_v=p.k_v * mu_t * mu_i / mu_l,
        c=p.c * mu_t ** 4 * mu_i ** 2 / (mu_m * mu_l ** 2),
        kappa=p.kappa * mu_i ** 4 * mu_t ** 9 / (mu_m ** 3 * mu_l ** 6),
        rho=p.rho * mu_i ** 2 * mu_t ** 3 / (mu_m * mu_l ** 2),
        gamma_p=p.gamma_p * mu_i / mu_l,
        eps_f=p.eps_f * mu_l / mu_t,
        n_f=p.n_f,
    )
    g0 = nondimensionalize(p, characteristic_scales(p))
    g1 = nondimensionalize(scaled, characteristic_scales(scaled))
    for name in ("zeta", "pi_f", "pi_V", "pi_eps", "n_f", "pi_c", "pi_l",
                 "pi_s"):
        assert math.isclose(getattr(g0, name), getattr(g1, name),
                            rel_tol=1e-9)


def test_round_trip_vector_field():
    """Dimensionless field == rescaled dimensional field at matched states."""
    p = make_params()
    sc = characteristic_scales(p)
    g = nondimensionalize(p, sc)
    scale_x = np.array([sc.V_star, sc.l_star / sc.t_star, sc.l_star,
                        sc.l_star / sc.t_star])
    scale_f = np.array([sc.t_star / sc.V_star, sc.t_star ** 2 / sc.l_star,
                        sc.t_star / sc.l_star, sc.t_star ** 2 / sc.l_star])
    rng = np.random.default_rng(7)
    for _ in range(25):
        x_nd = rng.standard_normal(4)
        f_nd = vector_field(x_nd, g)
        f_dim = vector_field_dimensional(scale_x * x_nd, p)
        assert np.allclose(f_nd, scale_f * f_dim, rtol=1e-12,
                           atol=1e-12 * np.max(np.abs(f_nd)))


def test_mapping_groups_shape():
    g = groups_from_mapping({"groups": {
        "zeta": 1.0, "pi_f": 2.0, "pi_V": 0.5, "pi_eps": 10.0, "n_f": 0.5,
        "pi_c": 1.0, "pi_l": 2.0, "pi_s": 3.0}})
    assert g.pi_s == 3.0
    assert g.eps == 1e-4


def test_mapping_dimensional_shape():
    body = dict(m=0.02, ell=0.1, k=5.0, b=0.05, A_sigma=0.8, k_v=0.4,
                c=1e-6, kappa=10.0, rho=0.1, gamma_p=0.1, eps_f=0.005,
                n_f=0.7, eps=1e-3)
    g = groups_from_mapping({"dimensional": body})
    assert g.eps == 1e-3
    assert g.n_f == 0.7


@pytest.mark.parametrize("bad", [
    {"groups": {"zeta": 1.0}},                                     # missing
    {"groups": {"zeta": 1.0, "pi_f": 2.0, "pi_V": 0.5, "pi_eps": 10.0,
                "n_f": 0.5, "pi_c": 1.0, "pi_l": 2.0, "pi_s": 3.0,
                "bogus": 1.0}},                                    # unknown
    {"dimensional": {"m": 1.0, "bogus": 2.0}},
    {"groups": {}, "dimensional": {}},                             # both
    {},                                                            # neither
    {"something": {}},
])
def test_mapping_rejects_bad_shapes(bad):
    with pytest.raises(ConfigError):
        groups_from_mapping(bad)


def test_load_groups_file(tmp_path):
    import json
    path = tmp_path / "params.json"
    path.write_text(json.dumps(
        {"groups": {"zeta": 0.5, "pi_f": 1.0, "pi_V": 0.5, "pi_eps": 5.0,
                    "n_f": 0.3, "pi_c": 2.0, "pi_l": 4.0, "pi_s": 1.5}}))
    g = load_groups(str(path))
    assert g.pi_l == 4.0
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(ConfigError):
        load_groups(str(bad))


def test_groups_validation():
    with pytest.raises(InvalidParameterError):
        Groups(zeta=-0.1, pi_f=1, pi_V=1, pi_eps=1, n_f=1, pi_c=1, pi_l=1,
               pi_s=1)
    with pytest.raises(InvalidParameterError):
        Groups(zeta=0, pi_f=0.0, pi_V=1, pi_eps=1, n_f=1, pi_c=1, pi_l=1,
               pi_s=1)
    # isotropic friction (n_f = 0) is allowed for the relay analysis
    Groups(zeta=0, pi_f=1, pi_V=1, pi_eps=1, n_f=0.0, pi_c=1, pi_l=1, pi_s=1)
