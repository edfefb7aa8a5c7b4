# coding: utf-8
import unittest
import numpy as np
from numpy.testing import assert_allclose
from blochzak import (
    CoefficientField, OperatorSpec, evaluate, validate, rescale, shift_zeroth,
    ellipticity_shift, constant, cosine, sine, to_samples, from_samples, multi_indices,
    NotElliptic, SelfAdjointViolation, SingularMatrix, NotPureSecondOrder)
from blochzak._coeffs import rescale_field


def _cos_1d():
    return OperatorSpec(1, [[constant(2.0) + cosine(1.0, 1)]], self_adjoint=True)


class TestCoefficientField(unittest.TestCase):

    def test_multi_indices(self):
        ks = multi_indices(1, 2)
        self.assertEqual(ks.shape, (9, 2))
        self.assertEqual(ks[0].tolist(), [-1, -1])
        self.assertEqual(ks[1].tolist(), [-1, 0])
        self.assertEqual(ks[-1].tolist(), [1, 1])

    def test_evaluate(self):
        g = constant(2.0) + cosine(1.0, 1)
        assert_allclose(evaluate(g, [0.0, 0.5, 0.25]).real, [3.0, 1.0, 2.0], atol=1e-15)
        s = sine(1.0, 1)
        assert_allclose(evaluate(s, [0.25]).real, [1.0], atol=1e-15)

    def test_from_terms_accumulates(self):
        g = CoefficientField.from_terms(1, [(1, 0.5), (1, 0.25), (-2, 1.0)])
        self.assertEqual(g.cutoff, 2)
        self.assertAlmostEqual(g.terms()[(1,)], 0.75)
        self.assertEqual(g.lookup(np.array([[5]]))[0], 0.0)

    def test_reflect_conj(self):
        g = CoefficientField.from_terms(1, [(1, 1.0 + 2.0j), (0, 3.0)])
        r = g.reflect_conj()
        self.assertEqual(r.terms(), {(-1,): 1.0 - 2.0j, (0,): 3.0})
        self.assertFalse(g.is_real_valued())
        self.assertTrue(cosine(1.0, (1, 2)).is_real_valued())

    def test_real_flag_enforced(self):
        # e^{2 pi i x} is not real-valued
        with self.assertRaises(ValueError):
            CoefficientField.from_terms(1, [((1,), 1.0)], real=True)
        with self.assertRaises(ValueError):
            from_samples(np.exp(2j * np.pi * np.arange(8) / 8), 2, real=True)
        g = CoefficientField.from_terms(1, [((1,), 1.0)])
        self.assertAlmostEqual(evaluate(g, [0.25])[0], 1j)
        h = CoefficientField.from_terms(1, [((1,), 0.5 - 0.5j), ((-1,), 0.5 + 0.5j)], real=True)
        self.assertTrue(h.is_real_valued())
        assert_allclose(evaluate(h, [0.25]), [1.0 + 0j], atol=1e-15)

    def test_samples_round_trip(self):
        rng = np.random.default_rng(3)
        amps = rng.standard_normal((5, 5)) + 1j * rng.standard_normal((5, 5))
        g = CoefficientField(2, 2, amps)
        values = to_samples(g, 7)
        self.assertEqual(values.shape, (7, 7))
        back = from_samples(values, 2)
        assert_allclose(back.amplitudes, g.amplitudes, atol=1e-13)
        assert_allclose(values[1, 3], evaluate(g, [1 / 7, 3 / 7])[0], atol=1e-12)

    def test_samples_need_resolution(self):
        with self.assertRaises(ValueError):
            to_samples(cosine(1.0, 3), 6)


class TestOperatorSpec(unittest.TestCase):

    def test_pure_flag_derived(self):
        self.assertTrue(_cos_1d().pure_second_order)
        spec = _cos_1d().replace(zeroth=constant(1.0))
        self.assertFalse(spec.pure_second_order)
        with self.assertRaises(NotPureSecondOrder):
            _cos_1d().replace(zeroth=constant(1.0), pure_second_order=True)

    def test_validate_constant(self):
        report = validate(OperatorSpec(1, [[constant(1.0)]], self_adjoint=True))
        self.assertAlmostEqual(report.lambda_C, 1.0)
        self.assertAlmostEqual(report.class_norm, 2.0)

    def test_validate_cos(self):
        report = validate(_cos_1d())
        self.assertAlmostEqual(report.lambda_C, 1.0, places=12)
        self.assertAlmostEqual(report.class_norm, 4.0, places=12)

    def test_not_elliptic(self):
        with self.assertRaises(NotElliptic):
            validate(OperatorSpec(1, [[cosine(1.0, 1)]]))

    def test_self_adjoint_violations(self):
        with self.assertRaises(SelfAdjointViolation):
            validate(OperatorSpec(1, [[constant(1.0)]], zeroth=constant(1j), self_adjoint=True))
        principal = [[constant(1.0, 2), constant(0.1, 2)], [constant(0.2, 2), constant(1.0, 2)]]
        with self.assertRaises(SelfAdjointViolation):
            validate(OperatorSpec(2, principal, self_adjoint=True))
        c = [constant(0.5)]
        with self.assertRaises(SelfAdjointViolation):
            validate(OperatorSpec(1, [[constant(1.0)]], (c, c), self_adjoint=True))

    def test_ellipticity_checked_first(self):
        spec = OperatorSpec(1, [[cosine(1.0, 1)]], zeroth=constant(1j), self_adjoint=True)
        with self.assertRaises(NotElliptic):
            validate(spec)

    def test_first_order_self_adjoint_pair(self):
        c = [constant(0.3) + sine(0.2, 1) * 1j]
        c_prime = [-c[0].reflect_conj()]
        report = validate(OperatorSpec(1, [[constant(2.0) + cosine(1.0, 1)]], (c, c_prime), self_adjoint=True))
        self.assertGreater(report.first_order_norm, 0.0)

    def test_shift_zeroth(self):
        spec = shift_zeroth(_cos_1d(), 2.5)
        self.assertAlmostEqual(spec.zeroth.mean(), 2.5)
        with self.assertRaises(SelfAdjointViolation):
            shift_zeroth(_cos_1d(), 1j)
        c = [constant(1.0)]
        report = validate(OperatorSpec(1, [[constant(2.0)]], (c, [constant(-1.0)]), zeroth=constant(-1.0)))
        self.assertAlmostEqual(ellipticity_shift(report), 2.0 ** 2 / 2.0 + 1.0)


class TestRescale(unittest.TestCase):

    def test_scalar(self):
        g = rescale_field(cosine(1.0, 1), np.array([[3]]))
        self.assertEqual(g.cutoff, 3)
        self.assertEqual(set(g.terms()), {(3,), (-3,)})

    def test_matrix(self):
        M = np.array([[1, 1], [-1, 1]])
        g = rescale_field(cosine(1.0, (1, 0)), M)
        # amplitude moves to M^T k
        self.assertEqual(set(g.terms()), {(1, 1), (-1, -1)})

    def test_composition(self):
        M1 = np.array([[2, 1], [0, 1]])
        M2 = np.array([[1, 0], [1, 3]])
        g = cosine(1.0, (1, 0)) + sine(0.5, (1, 1)) + constant(2.0, 2)
        lhs = rescale_field(rescale_field(g, M1), M2)
        rhs = rescale_field(g, M1 @ M2)
        pts = np.random.default_rng(1).random((20, 2))
        assert_allclose(evaluate(lhs, pts), evaluate(rhs, pts), atol=1e-12)
        assert_allclose(evaluate(rhs, pts), evaluate(g, pts @ (M1 @ M2).T), atol=1e-12)

    def test_spec(self):
        spec = rescale(_cos_1d(), 2)
        self.assertEqual(set(spec.principal[0][0].terms()), {(-2,), (0,), (2,)})
        self.assertTrue(spec.self_adjoint)

    def test_singular(self):
        with self.assertRaises(SingularMatrix):
            rescale(_cos_1d(), 0)
        with self.assertRaises(SingularMatrix):
            rescale_field(cosine(1.0, (1, 0)), np.array([[1, 2], [2, 4]]))


if __name__ == "__main__":
    unittest.main()
