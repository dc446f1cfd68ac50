import math

import numpy as np
import pytest

from wdvv_lab import prepotential_zoo as zoo
from wdvv_lab import wdvv_verifier as wv
from wdvv_lab.special_fn import eisenstein

PI = math.pi
ANTI3 = np.fliplr(np.eye(3))


def cubic_family(extra=lambda t: 0):
    md = zoo.FamilyMetadata(3, ANTI3, 0, ((1.0, 0.0), (0.5, 0.0), (0.0, 0.0)), 2.0, lambda t: 0)
    return wv.CustomPrepotential("cubic", lambda t: t[0] ** 2 * t[2] / 2 + t[0] * t[1] ** 2 / 2 + extra(t), md)


def test_free_cubic():
    assert wv.check_associativity(cubic_family(), [0.3, -0.2, 0.5]) < 1e-9


def test_quadratic_terms_do_not_matter():
    t = [0.3, -0.2, 0.5]
    a = wv.check_associativity(cubic_family(), t)
    b = wv.check_associativity(cubic_family(lambda v: 3 * v[0] * v[1] - v[2] ** 2), t)
    assert abs(a - b) < 1e-9


def test_pure_scaling():
    md = zoo.FamilyMetadata(3, ANTI3, 0, ((1.0, 0.0),) * 3, 3.0, lambda t: 0)
    fam = wv.CustomPrepotential("t1t2t3", lambda t: t[0] * t[1] * t[2], md)
    assert wv.check_quasihomogeneity(fam, [0.2, 0.3, 0.4]) < 1e-12


@pytest.mark.parametrize("fid", ["G0_Phi0(2)", "G1_Holo(1)"])
def test_associativity_on_samples(fid, rng):
    t, seed = zoo.sample_point(fid, rng)
    assert wv.check_associativity(fid, t, tau_seed=seed) <= 1e-5


@pytest.mark.parametrize("fid, tol", [("G1_3D_Phi1", 1e-7), ("G1_Holo(2)", 1e-7), ("G0_Phi0(2)", 1e-5)])
def test_unit_recovers_metric(fid, tol, rng):
    t, seed = zoo.sample_point(fid, rng)
    assert wv.check_eta_recovery(fid, t, tau_seed=seed) <= tol


@pytest.mark.parametrize("fid, tol", [("G1_3D_Phi1", 1e-7), ("G0_Phi2mJ(2,1)", 1e-6)])
def test_quasihomogeneity(fid, tol, rng):
    t, seed = zoo.sample_point(fid, rng)
    assert wv.check_quasihomogeneity(fid, t, tau_seed=seed) <= tol


def test_hessian_entries_of_phi1(rng):
    from wdvv_lab.numdiff import adaptive_derivative_tensor

    t, _ = zoo.sample_point("G1_3D_Phi1", rng)
    H = adaptive_derivative_tensor(lambda v: zoo.eval_prepotential("G1_3D_Phi1", v), t, 2).tensor
    tau = 2j * PI * t[0]
    y3 = -PI ** 4 / 6 * t[1] ** 4 * eisenstein(tau, "E2", 2)
    x3 = 1j * PI ** 3 / 3 * t[1] ** 3 * eisenstein(tau, "E2", 1)
    assert abs(H[0, 0] - y3) <= 1e-6 * max(1, abs(y3))
    assert abs(H[0, 1] - x3) <= 1e-6 * max(1, abs(x3))


@pytest.mark.parametrize("fid", ["G1_3D_Phi1", "G1_3D_Phi3", "G0_Phi0(2)", "G0_PhiJ(2,2)"])
def test_hessian_consistency(fid, rng):
    t, seed = zoo.sample_point(fid, rng)
    assert wv.check_hessian_consistency(fid, t, tau_seed=seed) <= 1e-6


def test_printed_phi2_is_not_a_solution(rng):
    t, seed = zoo.sample_point("G1_3D_Phi2", rng)
    assert wv.check_associativity("G1_3D_Phi2", t, tau_seed=seed) < 1e-5
    assert wv.check_associativity("G1_3D_Phi2(printed)", t, tau_seed=seed) > 1e-3


def test_run_checks(rng):
    t, seed = zoo.sample_point("G1_3D_QPhi1(0.2+0.1i)", rng)
    res = wv.run_checks("G1_3D_QPhi1(0.2+0.1i)", t, tau_seed=seed)
    assert res.ok and set(res.passed) == {"assoc", "eta", "homog", "hessian"}


def test_families_without_oracle(rng):
    assert not wv.has_hessian_oracle("G1_Holo(1)")
    t, seed = zoo.sample_point("G1_Holo(1)", rng)
    res = wv.run_checks("G1_Holo(1)", t, tau_seed=seed)
    assert res.residual_hessian is None and "hessian" not in res.passed


def test_tolerance_override(rng):
    t, seed = zoo.sample_point("G1_3D_Phi1", rng)
    res = wv.run_checks("G1_3D_Phi1", t, tau_seed=seed, tolerances={"assoc": 1e-30})
    assert res.passed["assoc"] is False
