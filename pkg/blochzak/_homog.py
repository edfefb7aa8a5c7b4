# Copyright (c) blochzak contributors. All rights reserved.
# Licensed under the MIT License. See License.txt in the project root for
# license information.
###############################################################################

"""
Periodic cell problem at z = 1 and the homogenized constant-coefficient operator.
"""

import numpy as np
import scipy.linalg

from ._coeffs import OperatorSpec, constant
from ._errors import SingularCellProblem
from ._fiber import assemble, homogenized_symbol, PlaneWaveBasis


class HomogenizedOperator:
    def __init__(self, C_hat, c_hat, c0_hat, symmetrized=False, self_adjoint=False):
        C_hat = np.atleast_2d(np.asarray(C_hat, dtype=np.complex128))
        self.C_hat = C_hat
        self.c_hat = np.atleast_1d(np.asarray(c_hat, dtype=np.complex128))
        self.c0_hat = complex(c0_hat)
        self.symmetrized = bool(symmetrized)
        self.self_adjoint = bool(self_adjoint)

    @property
    def dim(self):
        return self.C_hat.shape[0]

    def to_spec(self):
        """
        The homogenized operator as a constant-coefficient OperatorSpec; the
        first-order part is split evenly between c and c'.
        """
        d = self.dim
        principal = [[constant(self.C_hat[i, j], d) for j in range(d)] for i in range(d)]
        half = [constant(self.c_hat[i] / 2.0, d) for i in range(d)]
        return OperatorSpec(d, principal, (half, list(half)), constant(self.c0_hat, d),
                            self_adjoint=self.self_adjoint)

    def eigenvalues(self, theta, K):
        """
        Ascending fiber eigenvalues <xi, C xi> + i <c, xi> + c_0 over |k|_inf <= K.
        """
        basis = PlaneWaveBasis(self.dim, K, theta)
        values = homogenized_symbol(self, basis.frequencies)
        if self.self_adjoint:
            return np.sort(values.real)
        return values[np.lexsort((values.imag, values.real))]

    def to_dict(self):
        return {
            "C_hat": [[[float(_v.real), float(_v.imag)] for _v in row] for row in self.C_hat],
            "c_hat": [[float(_v.real), float(_v.imag)] for _v in self.c_hat],
            "c0_hat": [self.c0_hat.real, self.c0_hat.imag],
            "symmetrized": self.symmetrized,
        }

    def __repr__(self):
        return "HomogenizedOperator(C_hat={}, c_hat={}, c0_hat={})".format(
            self.C_hat.tolist(), self.c_hat.tolist(), self.c0_hat)


class CellSolution:
    def __init__(self, basis, correctors, residuals, full_system):
        self.basis = basis
        # one column per principal column j
        self.correctors = correctors
        self.residuals = residuals
        self.full_system = full_system


def _derivative_rhs(fields, ks):
    # sum_l (i 2 pi a_l) g_l[a]
    out = np.zeros(ks.shape[0], dtype=np.complex128)
    for l, g in enumerate(fields):
        if not g.is_zero():
            out += 2j * np.pi * ks[:, l] * g.lookup(ks)
    return out


def _factorize(matrix):
    lu, piv = scipy.linalg.lu_factor(matrix, check_finite=True)
    diag = np.abs(np.diag(lu))
    if diag.size and diag.min() <= 1e3 * np.finfo(float).eps * max(1.0, diag.max()):
        raise SingularCellProblem("cell problem matrix of size {} is singular".format(matrix.shape[0]))
    return lu, piv


def cell_solve(spec, K):
    d = spec.dim
    fiber = assemble(spec, np.zeros(d), K)
    A = np.asarray(fiber.entries)
    ks = fiber.basis.index_set
    n = ks.shape[0]
    rhs = np.stack([_derivative_rhs([spec.principal[l][j] for l in range(d)], ks) for j in range(d)], axis=1)

    full_system = not spec.lower_order_vanishes()
    if full_system:
        keep = np.arange(n)
    else:
        keep = np.flatnonzero(np.any(ks != 0, axis=1))

    correctors = np.zeros((n, d), dtype=np.complex128)
    residuals = np.zeros(d)
    if np.any(rhs[keep]):
        sub = A[np.ix_(keep, keep)]
        lu_piv = _factorize(sub)
        sol = scipy.linalg.lu_solve(lu_piv, rhs[keep])
        correctors[keep] = sol
        norms = np.linalg.norm(rhs[keep], axis=0)
        res = np.linalg.norm(sub @ sol - rhs[keep], axis=0)
        residuals = np.where(norms > 0, res / np.where(norms > 0, norms, 1.0), res)
    return CellSolution(fiber.basis, correctors, residuals, full_system)


def homogenize(spec, K, symmetrize=False, cell=None):
    """
    C_ij = mean(c_ij) - sum_a f_i[-a] w_j[a],  f_i[a] = sum_k (i 2 pi a_k) c_ik[a]
    c_i  = mean(c_i + c'_i) - sum_a p[-a] w_i[a],  p[a] = sum_k (i 2 pi a_k) c_k[a]
    c_0  = mean(c_0)

    The pairing sum_a f_i[-a] w_j[a] is bilinear, not sesquilinear. For
    Hermitian c it equals G_i^H A^-1 G_j, where A is the cell matrix and
    G_j[a] = sum_l (i 2 pi a_l) c_lj[a] the cell right-hand side, since
    f_i[-a] = conj(G_i[a]) then.
    """
    d = spec.dim
    cell = cell or cell_solve(spec, K)
    ks = cell.basis.index_set
    W = cell.correctors

    C_hat = np.array([[spec.principal[i][j].mean() for j in range(d)] for i in range(d)], dtype=np.complex128)
    f_neg = np.stack([_derivative_rhs([spec.principal[i][k] for k in range(d)], -ks) for i in range(d)], axis=1)
    C_hat -= f_neg.T @ W

    c, c_prime = spec.first_order
    c_hat = np.array([c[i].mean() + c_prime[i].mean() for i in range(d)], dtype=np.complex128)
    p_neg = _derivative_rhs(c, -ks)
    c_hat -= p_neg @ W
    c0_hat = spec.zeroth.mean()

    if spec.self_adjoint:
        c0_hat = c0_hat.real
    if symmetrize:
        C_hat = (C_hat + C_hat.T) / 2.0
    return HomogenizedOperator(C_hat, c_hat, c0_hat, symmetrized=symmetrize, self_adjoint=spec.self_adjoint)


def cutoff_stability(spec, K_list, symmetrize=False):
    """
    (K, C_hat) for each cutoff; successive differences should shrink.
    """
    return [(K, homogenize(spec, K, symmetrize=symmetrize).C_hat) for K in K_list]
