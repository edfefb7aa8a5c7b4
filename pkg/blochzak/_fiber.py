# Copyright (c) blochzak contributors. All rights reserved.
# Licensed under the MIT License. See License.txt in the project root for
# license information.
###############################################################################

"""
Galerkin matrices of the z-periodic fiber operators H_z in plane waves
e_k(u) = exp(i xi_k . u), xi_k = theta + 2 pi k.
"""

import warnings
import numpy as np

from ._coeffs import multi_indices, check_self_adjoint
from ._errors import TruncationMismatch


class Quasimomentum:
    def __init__(self, theta, strict=True):
        theta = np.atleast_1d(np.asarray(theta, dtype=np.float64)).copy()
        if theta.ndim != 1:
            raise ValueError("quasimomentum must be a vector, got shape {}".format(theta.shape))
        if strict and (np.any(theta < -np.pi) or np.any(theta >= np.pi)):
            raise ValueError("quasimomentum {} is outside [-pi, pi)".format(theta.tolist()))
        theta.setflags(write=False)
        self._theta = theta

    @classmethod
    def wrap(cls, theta):
        theta = np.atleast_1d(np.asarray(theta, dtype=np.float64))
        wrapped = np.mod(theta + np.pi, 2 * np.pi) - np.pi
        # mod can round up to exactly pi
        wrapped[wrapped >= np.pi] -= 2 * np.pi
        return cls(wrapped)

    @property
    def theta(self):
        return self._theta

    @property
    def dim(self):
        return self._theta.shape[0]

    @property
    def z(self):
        return np.exp(1j * self._theta)

    def __repr__(self):
        return "Quasimomentum({})".format(self._theta.tolist())


def as_quasimomentum(theta, dim=None):
    if isinstance(theta, Quasimomentum):
        q = theta
    else:
        q = Quasimomentum(theta, strict=False)
    if dim is not None and q.dim != dim:
        if q.dim == 1:
            q = Quasimomentum(np.full(dim, q.theta[0]), strict=False)
        else:
            raise ValueError("quasimomentum of dimension {} for an operator of dimension {}".format(q.dim, dim))
    return q


class PlaneWaveBasis:
    def __init__(self, dim, cutoff, theta, index_set=None):
        self.dim = dim
        self.cutoff = cutoff
        self.theta = as_quasimomentum(theta, dim)
        if index_set is None:
            index_set = multi_indices(cutoff, dim)
        index_set = np.asarray(index_set, dtype=np.int64).reshape(-1, dim)
        index_set.setflags(write=False)
        self.index_set = index_set

    @property
    def size(self):
        return self.index_set.shape[0]

    @property
    def frequencies(self):
        return self.theta.theta[None, :] + 2 * np.pi * self.index_set

    def evaluate(self, points):
        """
        Matrix of basis values e_k(u), one row per point.
        """
        points = np.asarray(points, dtype=np.float64).reshape(-1, self.dim)
        return np.exp(1j * points @ self.frequencies.T)

    def same_indices(self, other):
        return self.index_set.shape == other.index_set.shape and np.array_equal(self.index_set, other.index_set)


class FiberMatrix:
    def __init__(self, basis, entries, hermitian):
        entries = np.asarray(entries, dtype=np.complex128)
        entries.setflags(write=False)
        self.basis = basis
        self.entries = entries
        self.hermitian = bool(hermitian)

    @property
    def size(self):
        return self.entries.shape[0]

    def hermitian_defect(self):
        return float(np.max(np.abs(self.entries - self.entries.conj().T), initial=0.0))


def assemble(spec, theta, K=None, index_set=None):
    """
    A[a,b] = sum_ij xi_ai xi_bj c_ij[a-b]
             + i sum_i (xi_bi c_i[a-b] + xi_ai c'_i[a-b]) + c_0[a-b]
    """
    theta = as_quasimomentum(theta, spec.dim)
    if K is None and index_set is None:
        raise ValueError("either a cutoff K or an explicit index set is required")
    if spec.self_adjoint:
        check_self_adjoint(spec)
    if K is not None and K < spec.cutoff:
        warnings.warn("fiber cutoff {} is below the coefficient cutoff {}".format(K, spec.cutoff))
    basis = PlaneWaveBasis(spec.dim, K if K is not None else -1, theta, index_set)
    ks = basis.index_set
    xi = basis.frequencies
    diff = ks[:, None, :] - ks[None, :, :]

    entries = spec.zeroth.lookup(diff)
    c, c_prime = spec.first_order
    for i in range(spec.dim):
        for j in range(spec.dim):
            cij = spec.principal[i][j]
            if not cij.is_zero():
                entries = entries + xi[:, None, i] * xi[None, :, j] * cij.lookup(diff)
        if not c[i].is_zero():
            entries = entries + 1j * xi[None, :, i] * c[i].lookup(diff)
        if not c_prime[i].is_zero():
            entries = entries + 1j * xi[:, None, i] * c_prime[i].lookup(diff)
    # only rounding asymmetry is left for a checked self-adjoint spec
    if spec.self_adjoint:
        entries = (entries + entries.conj().T) / 2.0
    return FiberMatrix(basis, entries, spec.self_adjoint)


def homogenized_symbol(h, xi):
    """
    <xi, C xi> + i <c, xi> + c_0 for rows of frequencies xi.
    """
    xi = np.asarray(xi, dtype=np.float64)
    return np.einsum('ni,ij,nj->n', xi, h.C_hat, xi) + 1j * xi @ h.c_hat + h.c0_hat


def assemble_homogenized(h, theta, K=None, index_set=None):
    theta = as_quasimomentum(theta, h.dim)
    basis = PlaneWaveBasis(h.dim, K if K is not None else -1, theta, index_set)
    diag = homogenized_symbol(h, basis.frequencies)
    if h.self_adjoint:
        diag = diag.real + 0j
    return FiberMatrix(basis, np.diag(diag), h.self_adjoint)


def check_same_basis(a, b):
    if not a.basis.same_indices(b.basis) or not np.allclose(a.basis.theta.theta, b.basis.theta.theta):
        raise TruncationMismatch("fiber matrices live on different plane-wave bases ({} vs {} modes)".format(
            a.basis.size, b.basis.size))


def torus_grid(G, dim):
    """
    Uniform quasimomenta 2 pi q / G with q in [-G//2, G - G//2), lexicographic.
    """
    if G < 1:
        raise ValueError("grid size must be positive, got {}".format(G))
    axis = 2 * np.pi * (np.arange(G) - G // 2) / G
    mesh = np.meshgrid(*([axis] * dim), indexing='ij')
    return np.stack([_m.reshape(-1) for _m in mesh], axis=-1)


def torus_position(q, G):
    """
    Grid position of the integer label q (any representative mod G).
    """
    return np.mod(np.asarray(q) + G // 2, G)


def write_matrix_csv(fm, path):
    n = fm.size
    with open(path, 'w') as f:
        f.write("# blochzak fiber matrix\n")
        f.write("# size={} hermitian={} theta={}\n".format(
            n, int(fm.hermitian), ' '.join('%.15g' % _t for _t in fm.basis.theta.theta)))
        f.write("# index_set={}\n".format(';'.join(','.join(str(_i) for _i in k) for k in fm.basis.index_set)))
        f.write("row,col,re,im\n")
        for a in range(n):
            for b in range(n):
                v = fm.entries[a, b]
                f.write("{},{},{},{}\n".format(a, b, '%.15g' % v.real, '%.15g' % v.imag))


def write_matrix_npy(fm, path):
    np.save(path, np.asarray(fm.entries))
