# Copyright (c) blochzak contributors. All rights reserved.
# Licensed under the MIT License. See License.txt in the project root for
# license information.
###############################################################################

import warnings
import numpy as np
import scipy.linalg
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from ._coeffs import OperatorSpec, constant, HERMITIAN_TOL
from ._errors import NotHermitian, ConvergenceFailure, NotSelfAdjoint, NotRealPotential
from ._fiber import FiberMatrix, assemble, torus_grid
from ._config import parallel_map


DEGENERACY_RTOL = 1e-10


class EigenSystem:
    def __init__(self, eigenvalues, eigenvectors, basis=None):
        self.eigenvalues = np.asarray(eigenvalues, dtype=np.float64)
        self.eigenvectors = np.asarray(eigenvectors, dtype=np.complex128)
        self.basis = basis

    @property
    def size(self):
        return self.eigenvalues.shape[0]

    def projector(self, lo, hi):
        """
        Spectral projector onto eigenvalues in [lo, hi].
        """
        sel = (self.eigenvalues >= lo) & (self.eigenvalues <= hi)
        v = self.eigenvectors[:, sel]
        return v @ v.conj().T


def _blocks(entries):
    pattern = csr_matrix(entries != 0)
    count, labels = connected_components(pattern, directed=False)
    return [np.flatnonzero(labels == _c) for _c in range(count)]


def _fix_phase(v):
    j = np.argmax(np.abs(v) > np.max(np.abs(v)) * (1 - 1e-12))
    return v * (np.conj(v[j]) / abs(v[j]))


def _canonical_frame(vectors):
    """
    Deterministic orthonormal frame of the span of `vectors`, from the
    column-pivoted QR of its projector.
    """
    k = vectors.shape[1]
    projector = vectors @ vectors.conj().T
    q, _, _ = scipy.linalg.qr(projector, pivoting=True, mode='economic')
    frame = q[:, :k]
    return np.stack([_fix_phase(frame[:, _i]) for _i in range(k)], axis=1)


def eig_hermitian(A, check=True):
    """
    Ascending eigenvalues with an orthonormal eigenvector frame.

    The matrix is split into the connected blocks of its nonzero pattern, so
    modes that decouple exactly are diagonalized exactly. Eigenvectors inside
    numerically degenerate clusters are reported in a canonical frame; only
    their span is meaningful.
    """
    if isinstance(A, FiberMatrix):
        if not A.hermitian:
            raise NotHermitian("fiber matrix comes from a non-self-adjoint operator")
        entries, basis = np.asarray(A.entries), A.basis
    else:
        entries, basis = np.asarray(A, dtype=np.complex128), None
    n = entries.shape[0]
    if entries.shape != (n, n):
        raise ValueError("expected a square matrix, got shape {}".format(entries.shape))
    scale = max(1.0, float(np.max(np.abs(entries), initial=0.0)))
    if check:
        defect = float(np.max(np.abs(entries - entries.conj().T), initial=0.0))
        if defect > HERMITIAN_TOL * scale:
            raise NotHermitian("matrix is not Hermitian (defect {:.3g})".format(defect))

    values = np.empty(n, dtype=np.float64)
    vectors = np.zeros((n, n), dtype=np.complex128)
    col = 0
    for idx in _blocks(entries):
        block = entries[np.ix_(idx, idx)]
        try:
            w, v = scipy.linalg.eigh(block)
        except (scipy.linalg.LinAlgError, ValueError) as e:
            raise ConvergenceFailure("Hermitian eigensolver failed on a block of size {}: {}".format(len(idx), e))
        m = len(idx)
        values[col:col + m] = w
        vectors[idx, col:col + m] = v
        col += m

    order = np.argsort(values, kind='mergesort')
    values = values[order]
    vectors = vectors[:, order]

    tol = DEGENERACY_RTOL * max(1.0, float(np.max(np.abs(values), initial=0.0)))
    start = 0
    while start < n:
        stop = start + 1
        while stop < n and values[stop] - values[stop - 1] <= tol:
            stop += 1
        if stop - start > 1:
            vectors[:, start:stop] = _canonical_frame(vectors[:, start:stop])
        else:
            vectors[:, start] = _fix_phase(vectors[:, start])
        start = stop
    return EigenSystem(values, vectors, basis)


class BandStructure:
    def __init__(self, theta_grid, bands, K, G=None):
        self.theta_grid = np.asarray(theta_grid, dtype=np.float64)
        self.bands = np.asarray(bands, dtype=np.float64)
        self.K = K
        self.G = G

    @property
    def n_bands(self):
        return self.bands.shape[1]


class BandReport:
    def __init__(self, intervals, gaps, overlaps):
        self.intervals = intervals
        self.gaps = gaps
        self.overlaps = overlaps

    def to_dict(self):
        return {
            "intervals": [[float(_lo), float(_hi)] for _lo, _hi in self.intervals],
            "gaps": [[int(_n), float(_g)] for _n, _g in self.gaps],
            "overlaps": [bool(_o) for _o in self.overlaps],
        }


def band_sweep(spec, G=32, K=8, n_max=None, threads=None):
    """
    Ascending fiber eigenvalues lambda_0..lambda_{n_max} on the uniform G^d grid.

    Band edges are grid extrema; true edges between grid points are missed by
    O(G^-2).
    """
    if not spec.self_adjoint:
        raise NotSelfAdjoint("band sweeps need a self-adjoint operator")
    if G % 2:
        warnings.warn("odd grid size {} does not sample theta = -pi; band edges there are missed".format(G))
    grid = torus_grid(G, spec.dim)
    size = (2 * K + 1) ** spec.dim
    if n_max is None:
        n_max = min(size, 10) - 1
    if n_max >= size:
        raise ValueError("n_max {} exceeds the basis size {}".format(n_max, size))

    def _solve(theta):
        return eig_hermitian(assemble(spec, theta, K)).eigenvalues[:n_max + 1]

    bands = parallel_map(_solve, list(grid), threads)
    return BandStructure(grid, np.stack(bands), K, G)


def band_report(bs, tol=1e-9):
    lo = bs.bands.min(axis=0)
    hi = bs.bands.max(axis=0)
    scale = max(1.0, float(np.max(np.abs(bs.bands))))
    intervals = list(zip(lo.tolist(), hi.tolist()))
    gaps = []
    overlaps = []
    for n in range(bs.n_bands - 1):
        gap = lo[n + 1] - hi[n]
        overlaps.append(bool(gap < -tol * scale))
        gaps.append((n, float(gap) if gap > tol * scale else 0.0))
    return BandReport(intervals, gaps, overlaps)


def band_multiplicity(bs, lam):
    """
    Number of bands whose interval contains lam.
    """
    lo = bs.bands.min(axis=0)
    hi = bs.bands.max(axis=0)
    return int(np.count_nonzero((lo <= lam) & (lam <= hi)))


def potential_gap_bound(V):
    """
    2 ||V - mean(V)||_2, a bound for every gap of -Laplacian + V.
    """
    terms = V.terms()
    zero = (0,) * V.dim
    return 2.0 * float(np.sqrt(sum(abs(_v) ** 2 for _k, _v in terms.items() if _k != zero)))


def schrodinger_spec(V):
    if not V.is_real_valued():
        raise NotRealPotential("potential has complex values")
    d = V.dim
    principal = [[constant(1.0 if i == j else 0.0, d) for j in range(d)] for i in range(d)]
    return OperatorSpec(d, principal, zeroth=V, self_adjoint=True)
