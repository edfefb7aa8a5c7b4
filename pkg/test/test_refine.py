# coding: utf-8
import unittest
import numpy as np
from numpy.testing import assert_allclose
from blochzak import (
    OperatorSpec, constant, cosine, get_preset, homogenize, refined_spectrum, refinement_check,
    refinement_limit, NotPureSecondOrder, NotSelfAdjoint)
from blochzak._refine import refinement_residues


class TestRefinement(unittest.TestCase):

    def test_free_operator(self):
        spec = OperatorSpec(1, [[constant(1.0)]], self_adjoint=True)
        K = 4
        refined = refined_spectrum(spec, 0.0, 2, K)
        ks = np.arange(-2 * K - 1, 2 * K + 1)
        assert_allclose(refined.merged, np.sort((2 * np.pi * ks) ** 2), rtol=1e-12, atol=1e-9)
        self.assertLessEqual(refinement_check(spec, 0.0, 2, K), 1e-8)

    def test_residues_stay_in_range(self):
        for theta in (-np.pi, -0.3, 0.0, 2.5):
            for N in (1, 2, 3, 4):
                js = refinement_residues([theta], N)
                self.assertEqual(js.shape[0], N)
                roots = (theta + 2 * np.pi * js[:, 0]) / N
                self.assertTrue(np.all(roots >= -np.pi) and np.all(roots < np.pi))

    def test_roots(self):
        refined = refined_spectrum(get_preset('cos-1d'), 0.7, 3, 4)
        self.assertEqual(refined.root_thetas.shape, (3, 1))
        assert_allclose(np.exp(3j * refined.root_thetas[:, 0]), np.exp(0.7j) * np.ones(3), atol=1e-14)
        self.assertEqual(refined.merged.shape[0], 3 * 9)

    def test_cos_exact(self):
        for N in (2, 3, 4):
            self.assertLessEqual(refinement_check(get_preset('cos-1d'), 0.4, N, 8), 1e-8)

    def test_two_dimensional_exact(self):
        self.assertLessEqual(refinement_check(get_preset('checkerboard-2d'), [0.3, -0.5], 2, 4), 1e-8)
        c = constant(2.0, 2) + cosine(1.0, (1, 0))
        laminate = OperatorSpec(2, [[c, None], [None, c]], self_adjoint=True)
        refined = refined_spectrum(laminate, [0.1, 0.2], 2, 3)
        self.assertEqual(refined.merged.shape[0], 2 ** 2 * 7 ** 2)
        self.assertLessEqual(refinement_check(laminate, [0.1, 0.2], 2, 3), 1e-8)

    def test_requirements(self):
        with self.assertRaises(NotPureSecondOrder):
            refined_spectrum(get_preset('mathieu'), 0.0, 2, 4)
        spec = OperatorSpec(1, [[constant(1.0) + cosine(0.5, 1)]])
        with self.assertRaises(NotSelfAdjoint):
            refinement_check(spec, 0.0, 2, 4)


class TestRefinementLimit(unittest.TestCase):

    def test_constant_coefficients(self):
        spec = OperatorSpec(1, [[constant(1.5)]], self_adjoint=True)
        rows = refinement_limit(spec, 0.3, [2, 4], 6)
        self.assertTrue(all(_r.deviation <= 1e-9 for _r in rows))

    def test_cos_deviation_decreases(self):
        # N = 2 keeps the theta = pi band edge among the first six values
        rows = refinement_limit(get_preset('cos-1d'), 0.0, [4, 8, 16, 32], 6)
        deviations = [_r.deviation for _r in rows]
        self.assertTrue(all(_a > _b for _a, _b in zip(deviations, deviations[1:])), deviations)
        self.assertEqual(rows[0].to_dict()['N'], 4)

    def test_lowest_value_approaches_homogenized(self):
        spec = get_preset('cos-1d')
        C_hat = homogenize(spec, 16).C_hat[0, 0].real
        errors = [abs(refined_spectrum(spec, 0.5, N, 8).merged[0] - C_hat * 0.25) for N in (2, 4, 8)]
        self.assertTrue(errors[0] > errors[1] > errors[2], errors)


if __name__ == "__main__":
    unittest.main()
