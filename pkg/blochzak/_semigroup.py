# Copyright (c) blochzak contributors. All rights reserved.
# Licensed under the MIT License. See License.txt in the project root for
# license information.
###############################################################################

"""
Heat semigroups on fibers, trace-class functionals, kernels and the
homogenization convergence diagnostics.

Every norm here is the norm of a Galerkin section; report the cutoff with
any number derived from it.
"""

import math
import warnings
import numpy as np
import scipy.linalg

from ._coeffs import rescale, to_samples
from ._errors import (NonpositiveTime, InvariantViolation, AliasingWindow,
                      NotPureSecondOrder, NotSelfAdjoint)
from ._fiber import FiberMatrix, assemble, assemble_homogenized, check_same_basis, torus_grid, as_quasimomentum
from ._spectral import eig_hermitian
from ._homog import homogenize
from ._config import parallel_map


_EPS = np.finfo(float).eps


class FiberSemigroup:
    def __init__(self, matrix, t, eigensystem=None, basis=None):
        self.matrix = np.asarray(matrix)
        self.t = t
        self.eigensystem = eigensystem
        self.basis = basis if basis is not None else getattr(eigensystem, 'basis', None)

    @property
    def path(self):
        return 'spectral' if self.eigensystem is not None else 'general'

    @property
    def trace(self):
        if self.eigensystem is not None:
            return float(np.sum(np.exp(-self.t * self.eigensystem.eigenvalues)))
        return complex(np.trace(self.matrix))


def _check_time(t):
    if not t > 0:
        raise NonpositiveTime("semigroup time must be positive, got {}".format(t))


def heat_fiber(es, t):
    """
    exp(-t A) = sum_n exp(-t lambda_n) P_n.
    """
    _check_time(t)
    weights = np.exp(-t * es.eigenvalues)
    v = es.eigenvectors
    return FiberSemigroup((v * weights) @ v.conj().T, t, eigensystem=es)


def heat_general(A, t):
    """
    exp(-t A) by scaling and squaring, for any fiber matrix.
    """
    _check_time(t)
    if isinstance(A, FiberMatrix):
        entries, basis = np.asarray(A.entries), A.basis
    else:
        entries, basis = np.asarray(A, dtype=np.complex128), None
    return FiberSemigroup(scipy.linalg.expm(-t * entries), t, basis=basis)


def heat(fm, t):
    if fm.hermitian:
        return heat_fiber(eig_hermitian(fm), t)
    return heat_general(fm, t)


def _as_matrix(x):
    return x.matrix if isinstance(x, FiberSemigroup) else np.asarray(x)


def trace_norm(m):
    return float(np.sum(scipy.linalg.svdvals(_as_matrix(m))))


def hs_norm(m):
    return float(np.linalg.norm(_as_matrix(m), 'fro'))


def operator_norm(m):
    m = _as_matrix(m)
    return float(scipy.linalg.svdvals(m)[0]) if m.size else 0.0


class InequalityReport:
    def __init__(self, rows):
        # rows: (name, lhs, rhs)
        self.rows = rows

    @property
    def slacks(self):
        return {_name: _rhs - _lhs for _name, _lhs, _rhs in self.rows}

    def to_dict(self):
        return {_name: {'lhs': _lhs, 'rhs': _rhs, 'slack': _rhs - _lhs} for _name, _lhs, _rhs in self.rows}


def _tolerance(rhs, n):
    return max(1e-12 * max(1.0, abs(rhs)), 64 * _EPS * n)


def check_trace_hs_inequalities(S_t, S_half, T_t, T_half):
    """
    ||S_t||_Tr <= ||S_{t/2}||_HS^2, the same for T, and
    ||S_t - T_t||_Tr <= (||S_{t/2}||_HS + ||T_{t/2}||_HS) ||S_{t/2} - T_{t/2}||_HS.

    Raises InvariantViolation when one fails beyond rounding.
    """
    S_t, S_half, T_t, T_half = (_as_matrix(_x) for _x in (S_t, S_half, T_t, T_half))
    hs_s, hs_t = hs_norm(S_half), hs_norm(T_half)
    rows = [
        ('trace_S', trace_norm(S_t), hs_s ** 2),
        ('trace_T', trace_norm(T_t), hs_t ** 2),
        ('difference', trace_norm(S_t - T_t), (hs_s + hs_t) * hs_norm(S_half - T_half)),
    ]
    n = S_t.shape[0]
    for name, lhs, rhs in rows:
        if lhs > rhs + _tolerance(rhs, n):
            raise InvariantViolation("trace inequality '{}' fails: {:.15g} > {:.15g}".format(name, lhs, rhs))
    return InequalityReport(rows)


class KernelGrid:
    def __init__(self, x, y, values, t):
        self.x = np.asarray(x, dtype=np.float64)
        self.y = np.asarray(y, dtype=np.float64)
        self.values = np.asarray(values)
        self.t = t

    def hermitian_defect(self):
        if self.x.shape != self.y.shape or not np.array_equal(self.x, self.y):
            raise ValueError("kernel is not sampled on a square grid")
        return float(np.max(np.abs(self.values - self.values.conj().T), initial=0.0))


def cell_grid(P, dim):
    """
    Points p / P, p in [0, P)^d, lexicographic.
    """
    return np.array(list(np.ndindex(*(P,) * dim)), dtype=np.float64).reshape(-1, dim) / P


def _points(grid, dim):
    if np.isscalar(grid):
        return cell_grid(int(grid), dim)
    return np.asarray(grid, dtype=np.float64).reshape(-1, dim)


def kernel_fiber(es, basis, t, grid, grid_v=None):
    """
    K(u, v) = sum_n exp(-t lambda_n) psi_n(u) conj(psi_n(v)) on cell points.
    """
    basis = basis if basis is not None else es.basis
    u = _points(grid, basis.dim)
    v = u if grid_v is None else _points(grid_v, basis.dim)
    s = heat_fiber(es, t).matrix
    values = basis.evaluate(u) @ s @ basis.evaluate(v).conj().T
    return KernelGrid(u, v, values, t)


def _diffusivity(spec):
    return max(float(np.max(np.abs(to_samples(_f, 2 * _f.cutoff + 16)))) for row in spec.principal for _f in row)


def _split(points):
    n = np.floor(points).astype(np.int64)
    return points - n, n


def kernel_line(spec, t, W, Q, x, y=None, K=16, threads=None):
    """
    Whole-space heat kernel from the fiber kernels,

        K_t(u - n, v) = Q^-d sum_q conj(z_q)^n K^{z_q}_t(u, v),

    with x = u + n_x, y = v + n_y and n = n_y - n_x. Offsets must satisfy
    |n|_inf <= W < Q / 2; the aliasing error is the Gaussian tail at distance Q - W.
    """
    _check_time(t)
    if not Q > 2 * W:
        raise AliasingWindow("quadrature size Q={} must exceed twice the window W={}".format(Q, W))
    d = spec.dim
    x = np.asarray(x, dtype=np.float64).reshape(-1, d)
    y = x if y is None else np.asarray(y, dtype=np.float64).reshape(-1, d)
    u, nx = _split(x)
    v, ny = _split(y)
    offsets = ny[None, :, :] - nx[:, None, :]
    if np.max(np.abs(offsets), initial=0) > W:
        raise AliasingWindow("points are {} cells apart, beyond the window W={}".format(
            int(np.max(np.abs(offsets))), W))

    # the aliased images sit Q - W cells away
    if (Q - W) ** 2 < 36.0 * _diffusivity(spec) * t:
        warnings.warn("aliasing margin Q - W = {} is short for t = {}; the periodized tail is above 1e-4".format(
            Q - W, t))
    thetas = torus_grid(Q, d)

    def _fiber_term(theta):
        fm = assemble(spec, theta, K)
        s = heat(fm, t).matrix
        values = fm.basis.evaluate(u) @ s @ fm.basis.evaluate(v).conj().T
        return values * np.exp(-1j * offsets @ theta)

    total = np.zeros((x.shape[0], y.shape[0]), dtype=np.complex128)
    for term in parallel_map(_fiber_term, list(thetas), threads):
        total += term
    return KernelGrid(x, y, total / Q ** d, t)


def gaussian_bound_fit(kernel, t, b):
    """
    Smallest a with |K_t(x, y)| <= a t^(-d/2) exp(-b |x - y|^2 / t) on the samples.
    """
    if not b > 0:
        raise ValueError("Gaussian rate b must be positive, got {}".format(b))
    d = kernel.x.shape[1]
    dist2 = np.sum((kernel.x[:, None, :] - kernel.y[None, :, :]) ** 2, axis=-1)
    return float(np.max(np.abs(kernel.values) * t ** (d / 2.0) * np.exp(b * dist2 / t)))


def _require_pure(spec):
    if not spec.lower_order_vanishes():
        raise NotPureSecondOrder("the diffusive scaling needs a pure second-order operator")


def scaling_check(spec, m, t, x=None, y=None, W=4, Q=64, K=16, threads=None):
    """
    max |K_t(x, y) - m^-d K^(m)_{t/m^2}(x/m, y/m)| where K^(m) belongs to c(m .).
    """
    _require_pure(spec)
    d = spec.dim
    if x is None:
        axis = np.arange(-2.0, 2.0, 0.25)
        x = np.stack(np.meshgrid(*([axis] * d), indexing='ij'), axis=-1).reshape(-1, d)
    x = np.asarray(x, dtype=np.float64).reshape(-1, d)
    y = x if y is None else np.asarray(y, dtype=np.float64).reshape(-1, d)
    if m == 1:
        return 0.0
    lhs = kernel_line(spec, t, W, Q, x, y, K, threads).values
    # c(m .) needs m K modes for the resolution of K modes of c
    rhs = kernel_line(rescale(spec, m), t / m ** 2, W, Q, x / m, y / m, m * K, threads).values / m ** d
    return float(np.max(np.abs(lhs - rhs)))


class ConvergenceRow:
    def __init__(self, m, trace_distance, hs_distance, eigen_sum):
        self.m = m
        self.trace_distance = trace_distance
        self.hs_distance = hs_distance
        self.eigen_sum = eigen_sum

    @property
    def slack(self):
        return self.trace_distance - self.eigen_sum

    def to_dict(self):
        return {'m': self.m, 'trace_distance': self.trace_distance, 'hs_distance': self.hs_distance,
                'eigen_sum': self.eigen_sum, 'slack': self.slack}


def homog_convergence(spec, theta, t, m_list, K, K_cell=None, threads=None):
    """
    Distances between exp(-t H^(m)_z) and exp(-t H_hat_z) per m, with the
    eigenvalue bound sum_n |exp(-t lambda_n(m)) - exp(-t lambda_hat_n)| <= trace distance.
    """
    if not spec.self_adjoint:
        raise NotSelfAdjoint("the eigenvalue bound needs a self-adjoint operator")
    _check_time(t)
    theta = as_quasimomentum(theta, spec.dim)
    h = homogenize(spec, K_cell or K)
    hat_fm = assemble_homogenized(h, theta, K)
    hat_es = eig_hermitian(hat_fm)
    hat_s = heat_fiber(hat_es, t).matrix

    def _row(m):
        fm = assemble(rescale(spec, m), theta, K)
        check_same_basis(fm, hat_fm)
        es = eig_hermitian(fm)
        diff = heat_fiber(es, t).matrix - hat_s
        eigen_sum = float(np.sum(np.abs(np.exp(-t * es.eigenvalues) - np.exp(-t * hat_es.eigenvalues))))
        row = ConvergenceRow(m, trace_norm(diff), hs_norm(diff), eigen_sum)
        tol = 1e-8 * max(row.trace_distance, row.eigen_sum) + 64 * _EPS * fm.size * float(np.max(np.abs(diff)))
        if row.eigen_sum > row.trace_distance + tol:
            raise InvariantViolation("eigenvalue bound fails at m={}: {:.15g} > {:.15g}".format(
                m, row.eigen_sum, row.trace_distance))
        return row

    return parallel_map(_row, list(m_list), threads)


def resolvent_convergence(spec, theta, lam, m_list, K, K_cell=None):
    """
    Operator-norm distance between (lam + H^(m)_z)^-1 and (lam + H_hat_z)^-1 per m.
    """
    theta = as_quasimomentum(theta, spec.dim)
    h = homogenize(spec, K_cell or K)
    hat_fm = assemble_homogenized(h, theta, K)
    eye = np.eye(hat_fm.size)
    hat_r = scipy.linalg.inv(lam * eye + hat_fm.entries)
    rows = []
    for m in m_list:
        fm = assemble(rescale(spec, m), theta, K)
        check_same_basis(fm, hat_fm)
        r = scipy.linalg.inv(lam * eye + fm.entries)
        rows.append((m, operator_norm(r - hat_r)))
    return rows


def fiber_continuity(spec, theta, t, deltas, K):
    """
    ||S^{theta+delta}_t - S^theta_t||_Tr for each delta, coefficients in the
    respective plane-wave bases.
    """
    theta = as_quasimomentum(theta, spec.dim)
    base = heat(assemble(spec, theta, K), t).matrix
    rows = []
    for delta in deltas:
        moved = as_quasimomentum(theta.theta + np.asarray(delta, dtype=np.float64), spec.dim)
        rows.append((delta, trace_norm(heat(assemble(spec, moved, K), t).matrix - base)))
    return rows


def heat_paths_agree(spec, theta, K, t):
    """
    Max entrywise difference between the spectral and the matrix-exponential semigroup.
    """
    fm = assemble(spec, theta, K)
    return float(np.max(np.abs(heat_fiber(eig_hermitian(fm), t).matrix - heat_general(fm, t).matrix)))


class KernelConvergence:
    def __init__(self, sup_distances, l1_distances):
        self.sup_distances = sup_distances
        self.l1_distances = l1_distances

    def to_dict(self):
        return {'sup_distances': [[_m, _v] for _m, _v in self.sup_distances],
                'l1_distances': [[_t, _v] for _t, _v in self.l1_distances]}


def _line_window(reach):
    return int(math.ceil(reach)) + 1


def kernel_convergence(spec, t, m_list, v=1.0, K=16, P=4, t_list=(), threads=None):
    """
    sup over |x|^2 + |y|^2 <= v t of |K^(m)_t - K_hat_t| for each m, and
    sup_x int dy |K_t - K_hat_t| for each time in t_list.
    """
    _require_pure(spec)
    d = spec.dim
    hat_spec = homogenize(spec, K).to_spec()

    radius = math.sqrt(v * t)
    axis = np.arange(-math.floor(radius * P), math.floor(radius * P) + 1) / P
    pts = np.stack(np.meshgrid(*([axis] * d), indexing='ij'), axis=-1).reshape(-1, d)
    pts = pts[np.sum(pts ** 2, axis=1) <= v * t]
    disc = np.sum(pts ** 2, axis=1)[:, None] + np.sum(pts ** 2, axis=1)[None, :] <= v * t
    W = _line_window(2 * radius)
    Q = max(64, 4 * W)
    hat_values = kernel_line(hat_spec, t, W, Q, pts, pts, K, threads).values
    sup_rows = []
    for m in m_list:
        values = kernel_line(rescale(spec, m), t, W, Q, pts, pts, m * K, threads).values
        sup_rows.append((m, float(np.max(np.abs(values - hat_values)[disc], initial=0.0))))

    l1_rows = []
    for s in t_list:
        # the kernels have Gaussian tails exp(-|x-y|^2 / (4 c_max s))
        c_max = _diffusivity(spec)
        W_s = _line_window(math.sqrt(100.0 * c_max * s))
        Q_s = 4 * W_s
        x = cell_grid(P, d)
        axis_y = np.arange(-W_s * P, (W_s + 1) * P) / P
        y = np.stack(np.meshgrid(*([axis_y] * d), indexing='ij'), axis=-1).reshape(-1, d)
        diff = (kernel_line(spec, s, W_s + 1, Q_s + 8, x, y, K, threads).values -
                kernel_line(hat_spec, s, W_s + 1, Q_s + 8, x, y, K, threads).values)
        l1_rows.append((s, float(np.max(np.sum(np.abs(diff), axis=1)) / P ** d)))
    return KernelConvergence(sup_rows, l1_rows)
