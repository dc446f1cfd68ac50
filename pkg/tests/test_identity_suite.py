import math

import numpy as np
import pytest

from wdvv_lab import identity_suite as ids
from wdvv_lab.errors import DomainError
from wdvv_lab.special_fn import eisenstein

PI = math.pi
EPS = np.finfo(float).eps


@pytest.mark.parametrize("tau", [0.8j, 0.3 + 1.1j])
def test_chazy(tau):
    assert ids.chazy_residual(tau) <= 1e-9


def test_chazy_zero_deformation_is_exact():
    assert ids.chazy_residual(0.8j, 0.0) == ids.chazy_residual(0.8j)


def test_ramanujan_at_i():
    assert max(ids.ramanujan_residuals(1j)) <= 1e-10


def test_ramanujan_zero_deformation():
    tau = 0.2 + 0.9j
    assert ids.ramanujan_residuals(None, (tau, 0.0)) == ids.ramanujan_residuals(tau)


@pytest.mark.parametrize("tau", [0.8j, 0.3 + 1.1j, 1.2j])
def test_deformation_continuity(tau):
    # the q = 0 residual can sit far below machine epsilon, so the
    # comparison uses eps as the floor of the reference
    r0 = max(ids.chazy_residual(tau, 0.0), *ids.ramanujan_residuals(None, (tau, 0.0)))
    r1 = max(ids.chazy_residual(tau, 1e-6), *ids.ramanujan_residuals(None, (tau, 1e-6)))
    assert r1 <= 10 * max(r0, EPS)


def test_e2_derivative_cross_oracle():
    tau, h = 0.15 + 1.05j, 1e-4
    fd = (eisenstein(tau + h, "E2") - eisenstein(tau - h, "E2")) / (2 * h)
    assert abs(fd - eisenstein(tau, "E2", 1)) <= 1e-7 * abs(fd)


def test_weierstrass_suite(rng):
    for _ in range(20):
        L = ids.random_lattice(rng)
        u, v = ids.random_arguments(L, rng)
        for key, val in ids.weierstrass_suite(L, u, v).items():
            assert val <= ids.TOLERANCES[key], key


def test_identity_result():
    r = ids.IdentityResult("chazy", {"tau": 1j}, 1e-12, 1e-9)
    assert r.passed
    assert not ids.IdentityResult("chazy", {}, float("nan"), 1e-9).passed


def test_ej_ode():
    assert ids.ej_ode_residual(1.2j, 1) <= 1e-6


def test_ej_bad_index():
    with pytest.raises(DomainError):
        ids.ej_ode_residual(1j, 4)


def test_ej_side_checks():
    res = ids.ej_side_checks(0.1 + 0.9j)
    assert res["ej_sum"] <= 1e-10 and res["ej_shift"] <= 1e-10


class TestFlatCoordinates:
    r = ids.genus1_flat_coords(0.5, 1j, 1.0)

    def test_t2(self):
        assert self.r["t"][1] == pytest.approx(math.sqrt(2), rel=1e-14)

    def test_t3(self):
        # zeta(1/2) = pi^2 E2 / 6 on the lattice Z + iZ, and E2(i) = 3/pi
        expected = 1 - PI ** 2 * eisenstein(1j, "E2") / 3
        assert self.r["t"][2] == pytest.approx(expected, abs=1e-13)
        assert self.r["t"][2] == pytest.approx(1 - PI, abs=1e-13)

    def test_cross_relations(self):
        assert max(self.r["residuals"].values()) <= 1e-10
        assert self.r["y"][1] == self.r["x"][2]

    def test_degenerate_input(self):
        with pytest.raises(DomainError):
            ids.genus1_flat_coords(0.0, 1j, 1.0)
