# Copyright (c) blochzak contributors. All rights reserved.
# Licensed under the MIT License. See License.txt in the project root for
# license information.
###############################################################################

"""
Spectral refinement for pure second-order operators: the fiber of
c(N .) over z is the direct sum of the base fibers over the N^d roots
w^N = z, scaled by N^2.
"""

import itertools
import math
import numpy as np

from ._coeffs import rescale, multi_indices
from ._errors import NotPureSecondOrder, NotSelfAdjoint
from ._fiber import assemble, as_quasimomentum
from ._spectral import eig_hermitian
from ._homog import homogenize
from ._config import parallel_map


class RefinedSpectrum:
    def __init__(self, N, theta, residues, root_thetas, root_eigenvalues):
        self.N = N
        self.theta = theta
        self.residues = residues
        self.root_thetas = root_thetas
        self.root_eigenvalues = root_eigenvalues
        self.merged = np.sort(np.concatenate(root_eigenvalues))


def _check_refinable(spec):
    if not spec.self_adjoint:
        raise NotSelfAdjoint("spectral refinement needs a self-adjoint operator")
    if not spec.lower_order_vanishes():
        raise NotPureSecondOrder("spectral refinement needs a pure second-order operator")


def refinement_residues(theta, N):
    """
    Integer vectors j with (theta + 2 pi j) / N in [-pi, pi)^d, lexicographic.
    """
    axes = []
    for th in np.atleast_1d(theta):
        lo = math.ceil((-N * math.pi - th) / (2 * math.pi))
        hi = math.ceil((N * math.pi - th) / (2 * math.pi))
        axes.append(range(lo, hi))
    return np.array(list(itertools.product(*axes)), dtype=np.int64).reshape(-1, len(axes))


def refined_spectrum(spec, theta, N, K_fiber, n_max=None, threads=None):
    _check_refinable(spec)
    if N < 1:
        raise ValueError("refinement factor must be positive, got {}".format(N))
    theta = as_quasimomentum(theta, spec.dim).theta
    js = refinement_residues(theta, N)
    roots = (theta[None, :] + 2 * np.pi * js) / N

    def _root(theta_w):
        values = eig_hermitian(assemble(spec, theta_w, K_fiber)).eigenvalues * N ** 2
        return values if n_max is None else values[:n_max + 1]

    return RefinedSpectrum(N, theta, js, roots, parallel_map(_root, list(roots), threads))


def refinement_check(spec, theta, N, K_fiber, threads=None):
    """
    Max distance between the sorted spectrum of c(N .) on the matched index set
    {j + N m : |m|_inf <= K_fiber} and the merged root spectra.
    """
    refined = refined_spectrum(spec, theta, N, K_fiber, threads=threads)
    ms = multi_indices(K_fiber, spec.dim)
    index_set = np.concatenate([_j[None, :] + N * ms for _j in refined.residues])
    direct = eig_hermitian(assemble(rescale(spec, N), refined.theta, index_set=index_set)).eigenvalues
    return float(np.max(np.abs(np.sort(direct) - refined.merged)))


class RefinementRow:
    def __init__(self, N, merged, homogenized):
        self.N = N
        self.merged = merged
        self.homogenized = homogenized

    @property
    def deviation(self):
        return float(np.max(np.abs(self.merged - self.homogenized)))

    def to_dict(self):
        return {'N': self.N, 'merged': self.merged.tolist(), 'homogenized': self.homogenized.tolist(),
                'deviation': self.deviation}


def refinement_limit(spec, theta, N_list, n_show, K_fiber=8, K_cell=16, threads=None):
    """
    First n_show values of N^2 lambda_n(w) against <xi_k, C_hat xi_k> for each N.
    """
    _check_refinable(spec)
    theta = as_quasimomentum(theta, spec.dim).theta
    h = homogenize(spec, K_cell)
    reach = max(K_fiber, int(math.ceil(math.sqrt(n_show))) + 1)
    homogenized = h.eigenvalues(theta, reach)[:n_show]
    rows = []
    for N in N_list:
        merged = refined_spectrum(spec, theta, N, K_fiber, threads=threads).merged[:n_show]
        rows.append(RefinementRow(N, merged, homogenized))
    return rows
