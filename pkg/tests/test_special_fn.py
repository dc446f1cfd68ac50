import cmath
import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wdvv_lab.errors import DomainError, NonConvergent, PoleError
from wdvv_lab.special_fn import (
    ModularPoint,
    SeriesControl,
    eisenstein,
    eisenstein_q,
    lattice_invariants,
    theta1_jet,
    weierstrass,
)

PI = math.pi


def theta_oracle(u, tau, d, terms=200):
    """Direct summation with no stopping rule, in extended precision."""
    mp.mp.dps = 30
    u, tau = mp.mpc(u), mp.mpc(tau)
    s = mp.mpc(0)
    for n in range(terms):
        k = 2 * n + 1
        w = 2 * (-1) ** n * mp.exp(1j * mp.pi * tau * (n + mp.mpf(1) / 2) ** 2) * (k * mp.pi) ** d
        s += w * [mp.sin, mp.cos, lambda x: -mp.sin(x), lambda x: -mp.cos(x)][d % 4](k * mp.pi * u)
    return complex(s)


class TestTheta:
    def test_vanishes_at_origin(self):
        assert theta1_jet(0.0, 0.7 + 1.3j)[0] == 0

    def test_odd(self):
        u, tau = 0.21 - 0.13j, 0.1 + 0.9j
        assert theta1_jet(-u, tau)[0] == pytest.approx(-theta1_jet(u, tau)[0], rel=1e-15)

    def test_direct_sum_oracle(self):
        value, deriv = theta1_jet(0.3, 1j, 1)
        assert abs(value - theta_oracle(0.3, 1j, 0)) <= 1e-12 * abs(value)
        assert abs(deriv - theta_oracle(0.3, 1j, 1)) <= 1e-12 * abs(deriv)

    @pytest.mark.parametrize("order", range(5))
    def test_jet_against_mpmath(self, order):
        tau, u = 0.2 + 1.1j, 0.3 + 0.1j
        nome = cmath.exp(1j * PI * tau)
        ref = complex(mp.jtheta(1, mp.pi * u, nome, order)) * PI ** order
        got = theta1_jet(u, tau, order)[order]
        assert abs(got - ref) <= 1e-13 * abs(ref)

    @settings(max_examples=40, deadline=None)
    @given(st.floats(-0.5, 0.5), st.floats(-0.3, 0.3), st.floats(-0.5, 0.5), st.floats(0.5, 2.0))
    def test_odd_property(self, ur, ui, tr, ti):
        u, tau = complex(ur, ui), complex(tr, ti)
        a, b = theta1_jet(u, tau)[0], theta1_jet(-u, tau)[0]
        assert abs(a + b) <= 1e-14 * max(1.0, abs(a))

    def test_rejects_lower_half_plane(self):
        with pytest.raises(DomainError):
            theta1_jet(0.1, -1j)

    def test_bad_order(self):
        with pytest.raises(DomainError):
            theta1_jet(0.1, 1j, 5)

    def test_term_budget(self):
        with pytest.raises(NonConvergent):
            theta1_jet(0.1, 0.001j, 0, SeriesControl(max_terms=8))


class TestEisenstein:
    def test_constant_terms(self):
        assert eisenstein(40j, "E2") == pytest.approx(1.0, abs=1e-15)
        assert eisenstein(40j, "E6") == pytest.approx(1.0, abs=1e-15)

    def test_e2_at_i(self):
        assert eisenstein(1j, "E2").real == pytest.approx(3 / PI, rel=1e-14)

    def test_e4_long_sum_oracle(self):
        mp.mp.dps = 40
        q = mp.exp(-4 * mp.pi)
        s = mp.mpf(0)
        for n in range(1, 401):
            sigma3 = sum(d ** 3 for d in range(1, n + 1) if n % d == 0)
            s += sigma3 * q ** n
        ref = float(1 + 240 * s)
        assert abs(eisenstein(2j, "E4") - ref) <= 1e-13 * ref

    def test_modular_point_nome(self):
        assert ModularPoint(1j).nome == pytest.approx(cmath.exp(-2 * PI))

    def test_derivative_matches_difference_quotient(self):
        tau, h = 0.1 + 0.9j, 1e-4
        fd = (eisenstein(tau + h, "E4") - eisenstein(tau - h, "E4")) / (2 * h)
        assert abs(eisenstein(tau, "E4", 1) - fd) <= 1e-6 * abs(fd)


class TestDeformedEisenstein:
    @pytest.mark.parametrize("which", ["E2", "E4"])
    def test_zero_deformation(self, which):
        tau = 0.2 + 0.8j
        assert eisenstein_q(tau, 0.0, which) == eisenstein(tau, which)

    def test_composition_oracle(self):
        q, tau_q = 0.1 + 0.2j, 0.3j
        w = 1 - q * tau_q
        ref = eisenstein(tau_q / w, "E2") / w ** 2 - 6j * q / (PI * w)
        assert abs(eisenstein_q(tau_q, q, "E2") - ref) <= 1e-12 * abs(ref)

    def test_integer_shift_spot_check(self):
        # quasi-modularity makes the deformation trivial for integer q
        tau_q = 0.1 + 1.2j
        assert abs(eisenstein_q(tau_q, 1.0, "E2") - eisenstein(tau_q, "E2")) < 1e-12

    def test_degenerate_transform(self):
        with pytest.raises(DomainError):
            eisenstein_q(1j, -1j, "E2")


@pytest.mark.parametrize("u,tau", [(0.17 + 0.05j, 0.2 + 1.1j), (-0.3 + 0.1j, -0.4 + 0.8j)])
def test_theta_quasi_periodicity(u, tau):
    base = theta1_jet(u, tau)[0]
    assert abs(theta1_jet(u + 1, tau)[0] + base) <= 1e-10 * abs(base)
    shifted = -cmath.exp(-1j * PI * tau - 2j * PI * u) * base
    assert abs(theta1_jet(u + tau, tau)[0] - shifted) <= 1e-10 * abs(shifted)


class TestLattice:
    def test_half_period_normalization(self):
        tau = 0.3 + 1.1j
        L = lattice_invariants(0.5, tau / 2)
        assert abs(L.g2 - 4 * PI ** 4 / 3 * eisenstein(tau, "E4")) <= 1e-12 * abs(L.g2)

    def test_scaling(self):
        L1 = lattice_invariants(0.5, 0.1 + 0.6j)
        a = 0.7 * cmath.exp(0.4j)
        L2 = lattice_invariants(0.5 * a, (0.1 + 0.6j) * a)
        assert abs(L2.g2 - L1.g2 / a ** 4) <= 1e-12 * abs(L2.g2)
        assert abs(L2.g3 - L1.g3 / a ** 6) <= 1e-12 * abs(L2.g3)

    def test_frame_invariants(self):
        L = lattice_invariants(0.4 + 0.1j, -0.2 + 0.5j)
        assert abs(L.e1 + L.e2 + L.e3) <= 1e-12 * abs(L.e1)
        assert abs(L.discriminant) > 0
        z1, z2 = weierstrass(L.omega1, L, "Zeta"), weierstrass(L.omega2, L, "Zeta")
        assert abs(L.omega2 * z1 - L.omega1 * z2 - 0.5j * PI) < 1e-12

    def test_square_lattice(self):
        L = lattice_invariants(0.5, 0.5j)
        e1, e2, e3 = (weierstrass(p, L, "P") for p in (0.5, 0.5j, 0.5 + 0.5j))
        assert abs(e2 + e1) < 1e-12 * abs(e1)
        assert abs(e3) < 1e-12 * abs(e1)
        # truncated symmetric lattice sum as an independent route
        R = 120
        n = np.arange(-R, R + 1)
        w = (n[:, None] + 1j * n[None, :]).ravel()
        w = w[w != 0]
        u = 0.5
        direct = 1 / u ** 2 + np.sum(1 / (u - w) ** 2 - 1 / w ** 2)
        assert abs(direct - e1) < 1e-3 * abs(e1)

    def test_orientation(self):
        with pytest.raises(DomainError):
            lattice_invariants(0.5j, 0.5)


class TestWeierstrass:
    L = lattice_invariants(0.45 + 0.1j, -0.15 + 0.55j)

    def test_zeta_odd(self):
        u = 0.13 + 0.07j
        assert abs(weierstrass(u, self.L, "Zeta") + weierstrass(-u, self.L, "Zeta")) < 1e-12

    def test_critical_half_period(self):
        assert abs(weierstrass(self.L.omega1, self.L, "Pprime")) < 1e-9

    def test_differential_equation(self, rng):
        L = self.L
        for _ in range(20):
            u = complex(*rng.uniform(0.05, 0.35, 2))
            p, dp = weierstrass(u, L, "P"), weierstrass(u, L, "Pprime")
            lhs, rhs = dp ** 2, 4 * p ** 3 - L.g2 * p - L.g3
            assert abs(lhs - rhs) <= 1e-10 * max(abs(lhs), abs(4 * p ** 3))

    def test_second_derivative_law(self):
        L = self.L
        u, h = 0.3 + 0.2j, 1e-3
        dp = [weierstrass(u + k * h, L, "Pprime") for k in (-2, -1, 1, 2)]
        dpp = (dp[0] - 8 * dp[1] + 8 * dp[2] - dp[3]) / (12 * h)
        p = weierstrass(u, L, "P")
        assert abs(dpp - (6 * p ** 2 - L.g2 / 2)) <= 1e-7 * abs(6 * p ** 2)

    def test_pole(self):
        with pytest.raises(PoleError):
            weierstrass(2 * self.L.omega1, self.L, "P")

    def test_unknown_function(self):
        with pytest.raises(DomainError):
            weierstrass(0.1, self.L, "Q")
