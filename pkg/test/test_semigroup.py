# coding: utf-8
import unittest
import numpy as np
from numpy.testing import assert_allclose
from blochzak import (
    OperatorSpec, constant, get_preset, list_presets, assemble, assemble_homogenized, eig_hermitian,
    homogenize, shift_zeroth, heat, heat_fiber, heat_general, trace_norm, hs_norm, operator_norm,
    check_trace_hs_inequalities, kernel_fiber, kernel_line, gaussian_bound_fit, scaling_check,
    homog_convergence, kernel_convergence, resolvent_convergence, fiber_continuity, heat_paths_agree,
    schrodinger_spec, InvariantViolation, NonpositiveTime, AliasingWindow, NotPureSecondOrder)
from blochzak._fiber import check_same_basis
from blochzak import TruncationMismatch


def _free_1d():
    return OperatorSpec(1, [[constant(1.0)]], self_adjoint=True)


def _cos_1d():
    return get_preset('cos-1d')


class TestFiberSemigroup(unittest.TestCase):

    def test_diagonal_trace(self):
        es = eig_hermitian(np.diag([0.0, 4 * np.pi ** 2, 4 * np.pi ** 2]))
        self.assertAlmostEqual(heat_fiber(es, 1.0).trace, 1 + 2 * np.exp(-4 * np.pi ** 2), places=15)

    def test_semigroup_law(self):
        fm = assemble(_cos_1d(), 0.3, 8)
        s = heat(fm, 0.3).matrix
        t = heat(fm, 0.5).matrix
        assert_allclose(s @ t, heat(fm, 0.8).matrix, atol=1e-12)

    def test_small_time(self):
        fm = assemble(_cos_1d(), 0.3, 8)
        assert_allclose(heat(fm, 1e-14).matrix, np.eye(fm.size), atol=1e-10)

    def test_shift_multiplies_trace(self):
        base = heat(assemble(_cos_1d(), 0.3, 8), 0.7).trace
        shifted = heat(assemble(shift_zeroth(_cos_1d(), 1.5), 0.3, 8), 0.7).trace
        self.assertAlmostEqual(shifted / base, np.exp(-0.7 * 1.5), places=12)

    def test_nonpositive_time(self):
        fm = assemble(_cos_1d(), 0.3, 4)
        with self.assertRaises(NonpositiveTime):
            heat(fm, 0.0)
        with self.assertRaises(NonpositiveTime):
            heat_general(fm, -1.0)

    def test_paths_agree(self):
        self.assertLessEqual(heat_paths_agree(_cos_1d(), 0.3, 8, 0.1), 1e-9)
        mathieu = get_preset('mathieu')
        self.assertLessEqual(heat_paths_agree(mathieu, -1.0, 8, 0.5), 1e-9)

    def test_general_path_for_non_self_adjoint(self):
        spec = OperatorSpec(1, [[constant(1.0)]], ([constant(0.5)], [None]))
        fm = assemble(spec, 0.2, 2)
        sg = heat(fm, 1.0)
        self.assertEqual(sg.path, 'general')
        xi = 0.2 + 2 * np.pi * np.arange(-2, 3)
        assert_allclose(np.diag(sg.matrix), np.exp(-(xi ** 2 + 0.5j * xi)), atol=1e-12)


class TestNorms(unittest.TestCase):

    def test_examples(self):
        self.assertAlmostEqual(trace_norm(np.diag([1.0, -2.0, 3.0])), 6.0)
        self.assertAlmostEqual(hs_norm(np.diag([1.0, -2.0, 3.0])), np.sqrt(14.0))
        self.assertAlmostEqual(trace_norm(np.array([[0.0, 1.0], [0.0, 0.0]])), 1.0)
        self.assertAlmostEqual(operator_norm(np.array([[3.0, 4.0], [0.0, 0.0]])), 5.0)

    def test_ordering(self):
        rng = np.random.default_rng(5)
        for _ in range(20):
            n = int(rng.integers(1, 12))
            X = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
            self.assertLessEqual(operator_norm(X), hs_norm(X) * (1 + 1e-12))
            self.assertLessEqual(hs_norm(X), trace_norm(X) * (1 + 1e-12))

    def test_inequalities(self):
        fm = assemble(_cos_1d(), 0.0, 8)
        report = check_trace_hs_inequalities(heat(fm, 1.0), heat(fm, 0.5), heat(fm, 1.0), heat(fm, 0.5))
        self.assertAlmostEqual(report.to_dict()['difference']['lhs'], 0.0)
        for name in list_presets():
            spec = get_preset(name)
            theta = np.full(spec.dim, 0.3)
            K = 8 if spec.dim == 1 else 4
            fm = assemble(spec, theta, K)
            others = {'homogenized': assemble_homogenized(homogenize(spec, 16), theta, K)}
            if not spec.lower_order_vanishes():
                others['free'] = assemble(OperatorSpec(spec.dim, spec.principal, self_adjoint=True), theta, K)
            for t in (0.25, 1.0):
                for other_name, other in others.items():
                    report = check_trace_hs_inequalities(
                        heat(fm, t), heat(fm, t / 2), heat(other, t), heat(other, t / 2))
                    self.assertTrue(all(_v >= -1e-12 for _v in report.slacks.values()), (name, other_name, t))

    def test_violation(self):
        eye = np.eye(3)
        with self.assertRaises(InvariantViolation):
            check_trace_hs_inequalities(2 * eye, eye, eye, eye)


class TestKernels(unittest.TestCase):

    def test_free_fiber_diagonal(self):
        spec = _free_1d()
        fm = assemble(spec, 0.4, 8)
        kg = kernel_fiber(eig_hermitian(fm), fm.basis, 1.0, [0.0, 0.3])
        expected = np.sum(np.exp(-(0.4 + 2 * np.pi * np.arange(-8, 9)) ** 2))
        assert_allclose(np.diag(kg.values), [expected, expected], atol=1e-12)
        self.assertLessEqual(kg.hermitian_defect(), 1e-12)

    def test_fiber_parseval(self):
        fm = assemble(_cos_1d(), 0.4, 8)
        es = eig_hermitian(fm)
        kg = kernel_fiber(es, fm.basis, 0.05, 24)
        lhs = np.sum(np.abs(kg.values) ** 2) / 24 ** 2
        self.assertAlmostEqual(lhs / np.sum(np.exp(-0.1 * es.eigenvalues)), 1.0, places=8)

    def test_free_gaussian(self):
        t = 0.5
        x = np.arange(-1.5, 1.5, 0.25)
        kg = kernel_line(_free_1d(), t, 4, 64, x, K=8)
        dx = x[:, None] - x[None, :]
        expected = np.exp(-dx ** 2 / (4 * t)) / np.sqrt(4 * np.pi * t)
        assert_allclose(kg.values, expected, atol=1e-8)
        self.assertAlmostEqual(gaussian_bound_fit(kg, t, 0.25), 1 / np.sqrt(4 * np.pi), places=6)
        self.assertLessEqual(kg.hermitian_defect(), 1e-12)

    def test_fit_grows_with_window(self):
        x = np.arange(-1.5, 1.5, 0.25)
        kg = kernel_line(_free_1d(), 0.5, 4, 64, x, K=8)
        near = np.abs(x[:, None] - x[None, :]) <= 1.0
        a_all = gaussian_bound_fit(kg, 0.5, 0.3)
        kg.values = np.where(near, kg.values, 0.0)
        self.assertLess(gaussian_bound_fit(kg, 0.5, 0.3), a_all)

    def test_periodicity(self):
        x = np.array([0.1, 0.45, 0.8])
        y = np.array([0.2, 0.6])
        a = kernel_line(_cos_1d(), 0.5, 4, 32, x, y + 1.0, K=8).values
        b = kernel_line(_cos_1d(), 0.5, 4, 32, x - 1.0, y, K=8).values
        assert_allclose(a, b, atol=1e-10)

    def test_conservation(self):
        P, W = 36, 6
        x = np.array([0.0, 0.25, 0.5])
        y = np.arange(-W * P, (W + 1) * P) / P
        kg = kernel_line(_cos_1d(), 0.1, W, 16, x, y, K=16)
        assert_allclose(np.sum(kg.values, axis=1).real / P, [1.0, 1.0, 1.0], atol=1e-6)

    def test_aliasing_window(self):
        with self.assertRaises(AliasingWindow):
            kernel_line(_free_1d(), 0.5, 4, 8, [0.0], K=4)
        with self.assertRaises(AliasingWindow):
            kernel_line(_free_1d(), 0.5, 2, 8, [0.0], [3.5], K=4)

    def test_aliasing_margin_warns(self):
        with self.assertWarns(UserWarning):
            kernel_line(_free_1d(), 2.0, 2, 5, [0.0], K=4)

    def test_scaling(self):
        self.assertLessEqual(scaling_check(_free_1d(), 3, 1.0, K=8), 1e-9)
        self.assertEqual(scaling_check(_cos_1d(), 1, 1.0, K=8), 0.0)
        self.assertLessEqual(scaling_check(_cos_1d(), 2, 1.0, Q=64, K=16), 1e-6)
        with self.assertRaises(NotPureSecondOrder):
            scaling_check(get_preset('mathieu'), 2, 1.0)


class TestHomogenizationConvergence(unittest.TestCase):

    def test_constant_is_its_own_limit(self):
        rows = homog_convergence(_free_1d(), 0.0, 1.0, [1, 2, 4], 8)
        self.assertTrue(all(_r.trace_distance <= 1e-12 for _r in rows))

    def test_cos_trace_distance_decreases(self):
        # m = 2 picks up the band edge at theta = pi, which lies below the homogenized parabola
        rows = homog_convergence(_cos_1d(), 0.0, 1.0, [2, 4, 8, 16], 96)
        distances = [_r.trace_distance for _r in rows]
        self.assertTrue(all(_a > _b for _a, _b in zip(distances, distances[1:])), distances)
        for row in rows:
            self.assertLessEqual(row.eigen_sum, row.trace_distance * (1 + 1e-8) + 1e-300)
            self.assertLessEqual(row.hs_distance, row.trace_distance * (1 + 1e-12))

    def test_truncation_mismatch(self):
        a = assemble(_cos_1d(), 0.0, 4)
        b = assemble_homogenized(homogenize(_cos_1d(), 8), 0.0, 5)
        with self.assertRaises(TruncationMismatch):
            check_same_basis(a, b)

    def test_resolvent(self):
        rows = resolvent_convergence(_cos_1d(), 0.5, 1.0, [1, 2, 4, 8], 48)
        values = [_v for _m, _v in rows]
        self.assertTrue(all(_a > _b for _a, _b in zip(values, values[1:])), values)

    def test_fiber_continuity(self):
        rows = fiber_continuity(_cos_1d(), 0.2, 0.5, [1e-1, 1e-2, 1e-3], 8)
        values = [_v for _d, _v in rows]
        self.assertTrue(values[0] > values[1] > values[2])
        self.assertLess(values[2], 1e-2)

    def test_kernel_convergence(self):
        report = kernel_convergence(_free_1d(), 1.0, [1, 2], K=8, t_list=[1.0])
        self.assertTrue(all(_v <= 1e-12 for _m, _v in report.sup_distances))
        report = kernel_convergence(_cos_1d(), 1.0, [1, 2, 4], K=8)
        sup = [_v for _m, _v in report.sup_distances]
        self.assertTrue(all(_a > _b for _a, _b in zip(sup, sup[1:])), sup)

    def test_kernel_l1_decay(self):
        report = kernel_convergence(_cos_1d(), 1.0, [], K=8, t_list=[1.0, 4.0, 16.0])
        l1 = [_v for _t, _v in report.l1_distances]
        self.assertTrue(all(_a > _b for _a, _b in zip(l1, l1[1:])), l1)

    def test_requires_pure(self):
        with self.assertRaises(NotPureSecondOrder):
            kernel_convergence(schrodinger_spec(constant(1.0)), 1.0, [1])


if __name__ == "__main__":
    unittest.main()
