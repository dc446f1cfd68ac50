import math

import numpy as np
import pytest

from wdvv_lab import hurwitz_g0 as hg
from wdvv_lab.errors import DegenerateCovering, DomainError
from wdvv_lab.wdvv_verifier import assembler_residual, sample_covering

EXAMPLE = hg.RationalCovering([1, -1], [1 / 3, 1 / 3, 1 / 3])


def charts(m):
    return ["Phi0"] + [f"PhiJ({j})" for j in range(1, m + 1)] + [f"Phi2mJ({j})" for j in range(1, m + 1)]


class TestCovering:
    def test_residues_must_sum_to_one(self):
        with pytest.raises(DomainError):
            hg.RationalCovering([1, -1], [0.5, 0.5, 0.5])

    def test_coincident_poles(self):
        with pytest.raises(DegenerateCovering):
            hg.RationalCovering([1, 1], [1 / 3, 1 / 3, 1 / 3])

    def test_params_round_trip(self, rng):
        cov = hg.random_covering(3, rng)
        again = hg.RationalCovering.from_params(cov.params)
        assert np.allclose(again.a, cov.a) and np.allclose(again.b, cov.b)


class TestCriticalData:
    def test_companion_matrix_oracle(self):
        bd = hg.critical_data(EXAMPLE)
        coeffs = EXAMPLE.f2m_coefficients()
        ref = np.linalg.eigvals(np.diag(np.ones(3), -1) - np.outer(np.eye(4)[0], coeffs[1:] / coeffs[0]))
        assert len(bd.alpha) == 4
        for z in bd.alpha:
            assert np.min(np.abs(ref - z)) < 1e-10

    def test_conjugation_symmetry(self):
        alpha = hg.critical_data(EXAMPLE).alpha
        for z in alpha:
            assert np.min(np.abs(alpha - np.conj(z))) < 1e-10

    def test_degree(self, rng):
        cov = hg.random_covering(3, rng)
        bd = hg.critical_data(cov)
        assert bd.alpha.size == 6
        assert len(set(np.round(bd.lam, 8))) == 6

    def test_polish_residual(self, rng):
        for m in (2, 3, 4):
            assert hg.critical_data(hg.random_covering(m, rng)).residual <= 1e-12


class TestCharts:
    def test_phi0_example(self):
        t = hg.flat_chart(EXAMPLE, "Phi0").coords
        expected = [math.log(1 / 3), math.log(1 / 3) - 1j * math.pi, 1 / 3, -1 / 3]
        assert np.allclose(t, expected, atol=1e-14)

    def test_phi0_to_covering(self, rng):
        cov = hg.random_covering(3, rng)
        back = hg.phi0_to_covering(hg.flat_chart(cov, "Phi0").coords)
        assert np.allclose(back.params, cov.params, atol=1e-12)

    @pytest.mark.parametrize("m", [2, 3, 4])
    def test_sum_rules(self, rng, m):
        t = hg.flat_chart(hg.random_covering(m, rng), "Phi0").coords
        res = hg.sum_rule_residuals(t)
        assert res["R1"] < 1e-10 and res["R2"] < 1e-10 and res["swap"] < 1e-10

    def test_chart_inversion(self, rng):
        cov = hg.random_covering(2, rng)
        t = hg.flat_chart(cov, "Phi0").coords
        for cid in charts(2)[1:]:
            c = hg.flat_chart(cov, cid).coords
            assert np.allclose(hg.chart_from_phi0(t, cid), c, atol=1e-12)
            back = hg.phi0_from_chart(c, cid, t)
            assert np.allclose(np.exp(back[:2]), np.exp(t[:2]), atol=1e-10)
            assert np.allclose(back[2:], t[2:], atol=1e-10)

    def test_bad_chart_id(self):
        with pytest.raises(DomainError):
            hg.parse_chart_id("PhiK(1)")


class TestPairings:
    @pytest.mark.parametrize("m", [2, 3])
    def test_flat_metric_is_anti_identity(self, rng, m):
        cov = hg.random_covering(m, rng)
        G = hg.gram_matrix(cov, hg.critical_data(cov))
        assert np.max(np.abs(G - np.fliplr(np.eye(2 * m)))) < 1e-9

    def test_intersection_third_kind_block(self, rng):
        cov = hg.random_covering(3, rng)
        bd = hg.critical_data(cov)
        for i in range(1, 4):
            for j in range(1, 4):
                val = hg.gram_pairing(cov, bd, f"phi{i}", f"phi{j}", (1.0, 0.0))
                assert abs(val - (1 + (i == j))) < 1e-9

    def test_intersection_closed_form(self, rng):
        cov = hg.random_covering(2, rng)
        G = hg.gram_matrix(cov, hg.critical_data(cov), (1.0, 0.0))
        ref = hg.intersection_closed_form(cov)
        assert np.max(np.abs(G - ref)) < 1e-9 * max(1.0, np.max(np.abs(ref)))

    def test_alias_and_range(self):
        assert hg.parse_differential("s2", 3) == 2
        with pytest.raises(DomainError):
            hg.parse_differential("phi7", 3)


class TestJacobians:
    def test_fd_matches_closed_form(self, rng):
        cov = hg.random_covering(2, rng)
        for cid in charts(2):
            assert hg.lambda_jacobian_residual(cov, cid) < 1e-5

    def test_unit_acts_as_sum_of_branch_derivatives(self, rng):
        assert hg.unit_action_residual(hg.random_covering(3, rng)) < 1e-9

    def test_chart_composition(self, rng):
        cov = hg.random_covering(2, rng)
        for kind in ("PhiJ", "Phi2mJ"):
            for j in (1, 2):
                assert hg.chart_composition_residual(cov, j, kind) < 1e-6


class TestAssembler:
    def test_agrees_with_closed_forms(self, rng):
        cov = sample_covering(2, rng)
        for kind, j in [("Phi0", 0), ("PhiJ", 1), ("PhiJ", 2), ("Phi2mJ", 1), ("Phi2mJ", 2)]:
            assert assembler_residual(cov, kind, j) < 1e-5

    def test_hessian_closed_form_is_symmetric(self, rng):
        t = hg.flat_chart(hg.random_covering(3, rng), "Phi0").coords
        H = hg.phi0_hessian_closed_form(t)
        assert np.allclose(H, H.T, atol=1e-12)
