import math

import numpy as np
import pytest

from wdvv_lab import prepotential_zoo as zoo
from wdvv_lab.errors import DomainError

PI = math.pi


class TestParsing:
    @pytest.mark.parametrize("text, value", [
        ("0.2+0.1i", 0.2 + 0.1j), ("i", 1j), ("-i", -1j), ("3", 3), ("0+0.5i", 0.5j),
        ("-1.5-2j", -1.5 - 2j), ("2i", 2j),
    ])
    def test_complex_literals(self, text, value):
        assert zoo.parse_complex(text) == value

    @pytest.mark.parametrize("text", ["", "abc", "1+", "1++2i"])
    def test_bad_literal(self, text):
        with pytest.raises(DomainError):
            zoo.parse_complex(text)

    def test_canonical_ids(self):
        assert zoo.make_family("G0_PhiJ( 2, 1 )").family_id == "G0_PhiJ(2,1)"
        assert zoo.make_family("G1_3D_QPhi1(0.2+0.1i)").family_id == "G1_3D_QPhi1(0.2+0.1i)"
        assert zoo.make_family("G1_3D_Phi2(printed)").variant == "printed"
        assert zoo.make_family("G1_3D_Phi3").variant == "corrected"

    @pytest.mark.parametrize("fid", ["G0_Phi0(1)", "G0_PhiJ(2,3)", "Nope", "G1_3D_Phi2(other)",
                                     "G0_M2_Remark(F4)", "G1_Holo"])
    def test_bad_family(self, fid):
        with pytest.raises(DomainError):
            zoo.make_family(fid)

    def test_names_are_all_constructible(self):
        examples = {"G0_Phi0": "(2)", "G0_PhiJ": "(2,1)", "G0_Phi2mJ": "(2,1)", "G0_M2_Remark": "(F1)",
                    "G1_Holo": "(1)", "G1_Holo_Q": "(1,0.1)", "G1_3D_QPhi1": "(0.1)",
                    "G1_3D_QPhi2": "(0.1)", "G1_3D_QPhi3": "(0.1)"}
        for name in zoo.FAMILY_NAMES:
            assert zoo.make_family(name + examples.get(name, "")).kind == name


class TestValues:
    def test_phi1_without_t2(self):
        t = np.array([0.15 + 0.02j, 0.0, 0.4 - 0.1j])
        assert zoo.eval_prepotential("G1_3D_Phi1", t) == pytest.approx(0.5 * t[2] ** 2 * t[0], rel=1e-15)

    def test_q_zero_reduction(self, rng):
        q0 = zoo.make_family("G1_3D_QPhi1(0)")
        for _ in range(5):
            t, _ = zoo.sample_point("G1_3D_Phi1", rng)
            a, b = zoo.eval_prepotential(q0, t), zoo.eval_prepotential("G1_3D_Phi1", t)
            assert abs(a - b) <= 1e-14 * max(1.0, abs(b))

    def test_holo_m1_closed_form(self, rng):
        for _ in range(10):
            t, _ = zoo.sample_point("G1_Holo(1)", rng)
            a = zoo.eval_prepotential("G1_Holo(1)", t)
            b = zoo.eval_prepotential("G1_Holo_M1", t)
            assert abs(a - b) <= 1e-10 * max(1.0, abs(b))

    def test_holo_q_zero(self, rng):
        t, _ = zoo.sample_point("G1_Holo(2)", rng)
        assert zoo.eval_prepotential("G1_Holo_Q(2,0)", t) == pytest.approx(zoo.eval_prepotential("G1_Holo(2)", t))

    def test_inverse_round_trip(self, rng):
        for _ in range(5):
            t, _ = zoo.sample_point("G1_3D_Phi1", rng)
            x, y, tau = zoo.phi1_to_phi23(t)
            seed = tau + 0.05
            r1 = zoo.invert_e2prime(3 * x[2] / (1j * PI ** 3 * x[0] ** 3), seed)
            r2 = zoo.invert_chi(-8 / 3 * y[2] ** 3 / y[1] ** 4, seed)
            assert abs(r1 - tau) < 1e-9 and abs(r2 - tau) < 1e-9

    def test_charts_share_coordinates(self, rng):
        t, _ = zoo.sample_point("G1_3D_Phi1", rng)
        x, y, _ = zoo.phi1_to_phi23(t)
        assert y[1] == x[2]
        assert x[0] == t[1] and y[0] == t[2]

    def test_wrong_length(self):
        with pytest.raises(DomainError):
            zoo.eval_prepotential("G1_3D_Phi1", [0.1, 0.2])

    def test_non_finite(self):
        with pytest.raises(DomainError):
            zoo.eval_prepotential("G1_3D_Phi1", [0.1, np.nan, 0.2])

    def test_log_of_zero(self):
        with pytest.raises(DomainError):
            zoo.eval_prepotential("G0_Phi0(2)", [0.1, 0.2, 0.0, 0.3])


class TestMetadata:
    @pytest.mark.parametrize("fid", ["G0_Phi0(3)", "G1_Holo(2)", "G1_3D_Phi1", "G0_M2_Remark(F2)"])
    def test_eta(self, fid):
        md = zoo.family_metadata(fid)
        assert np.array_equal(md.eta, md.eta.T)
        assert np.array_equal(md.eta, np.fliplr(np.eye(md.N)))

    def test_phi1_euler(self):
        md = zoo.family_metadata("G1_3D_Phi1")
        assert md.euler == ((0.0, 0.0), (0.5, 0.0), (1.0, 0.0))
        assert md.degree == 2.0 and md.quadratic_correction([1, 2, 3]) == 0

    def test_holo_data(self):
        m = 2
        md = zoo.family_metadata(f"G1_Holo({m})")
        assert md.unit == 2 * m + 1 and md.degree == 2.0
        t = np.arange(1, 2 * m + 3, dtype=complex)
        primed = [t[2 * m + 1 - k] for k in range(1, m + 1)]
        expected = 0.5 * sum(p ** 2 for p in primed) + 0.5 * sum(primed) ** 2
        assert md.quadratic_correction(t) == pytest.approx(expected)

    def test_phi2mj_degree(self):
        md = zoo.family_metadata("G0_Phi2mJ(2,1)")
        assert md.degree == 4.0
        t = np.array([0.3, 0.4, 0.5, 0.7])
        # sum of squares plus half the off-diagonal products of y_{j,2m+1-k}
        assert md.quadratic_correction(t) == pytest.approx(0.7 ** 2 + 0.5 ** 2 + 0.7 * 0.5)


class TestSampling:
    def test_deterministic(self):
        a = zoo.sample_point("G0_PhiJ(2,1)", np.random.default_rng(3))
        b = zoo.sample_point("G0_PhiJ(2,1)", np.random.default_rng(3))
        assert np.array_equal(a[0], b[0])

    @pytest.mark.parametrize("fid", ["G1_3D_Phi3", "G1_Holo_Q(1,0.2+0.1i)", "G1_3D_QPhi2(0.1)"])
    def test_points_evaluate(self, fid, rng):
        t, seed = zoo.sample_point(fid, rng)
        assert np.isfinite(zoo.eval_prepotential(fid, t, seed))
