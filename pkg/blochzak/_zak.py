# Copyright (c) blochzak contributors. All rights reserved.
# Licensed under the MIT License. See License.txt in the project root for
# license information.
###############################################################################

"""
Discrete Zak transforms.

Signals live on the lattice (1/P)Z^d inside the window of translates
|n|_inf <= W of the unit cell; the torus integral is replaced by the uniform
roots-of-unity rule. With an integer matrix M of determinant N,

    (Z f)(z, u)   = sum_n z^n f(u - n)
    (Z_M f)(w, x) = sum_n w^n f(x - M^-1 n)

and w^M has the components exp(i (M^T theta_w)_k).
"""

import itertools
import numpy as np
import sympy
from sympy.matrices.normalforms import hermite_normal_form

from ._errors import AliasingWindow, GridIncompatible, SingularMatrix, InvariantViolation
from ._fiber import torus_grid, torus_position


class SampledSignal:
    def __init__(self, dim, P, W, values):
        length = P * (2 * W + 1)
        values = np.asarray(values, dtype=np.complex128)
        if values.shape != (length,) * dim:
            raise ValueError("signal with P={} and W={} needs shape {}, got {}".format(
                P, W, (length,) * dim, values.shape))
        self.dim = dim
        self.P = P
        self.W = W
        # entry s + P W holds f(s / P)
        self.values = values

    @classmethod
    def random(cls, dim, P, W, rng=None, support=None):
        """
        Complex Gaussian samples; `support` limits the nonzero translates to |n|_inf <= support.
        """
        rng = rng if rng is not None else np.random.default_rng(0)
        shape = (P * (2 * W + 1),) * dim
        values = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
        if support is not None:
            s = lattice_coordinates(dim, P, W)
            n = -np.floor_divide(s, P)
            values[np.any(np.abs(n) > support, axis=-1)] = 0.0
        return cls(dim, P, W, values)

    def norm(self):
        return float(np.sqrt(np.sum(np.abs(self.values) ** 2) / self.P ** self.dim))

    def at(self, s):
        """
        f(s / P) for integer lattice coordinates s (last axis), zero outside the window.
        """
        s = np.asarray(s, dtype=np.int64)
        idx = s + self.P * self.W
        inside = np.all((idx >= 0) & (idx < self.values.shape[0]), axis=-1)
        out = np.zeros(s.shape[:-1], dtype=np.complex128)
        out[inside] = self.values[tuple(idx[inside].T)]
        return out

    def shift(self, m):
        """
        The signal x -> f(x + m) for an integer translate m; it must stay inside the window.
        """
        m = np.atleast_1d(np.asarray(m, dtype=np.int64))
        s = lattice_coordinates(self.dim, self.P, self.W)
        values = self.at(s + self.P * m)
        if not np.isclose(np.sum(np.abs(values) ** 2), np.sum(np.abs(self.values) ** 2), rtol=1e-12, atol=0.0):
            raise AliasingWindow("shift by {} moves the signal out of the window W={}".format(m.tolist(), self.W))
        return SampledSignal(self.dim, self.P, self.W, values)


def lattice_coordinates(dim, P, W):
    """
    Integer coordinates s in [-P W, P W + P)^d, shaped like the signal plus a last axis.
    """
    axis = np.arange(-P * W, P * W + P)
    return np.stack(np.meshgrid(*([axis] * dim), indexing='ij'), axis=-1)


class ZakArray:
    """
    Values F(z_q, x_r) on a torus grid of G points per axis (flattened,
    lexicographic) and lattice points x_r = r / P (rows of `points`).
    """

    def __init__(self, dim, P, G, points, values, M=None):
        self.dim = dim
        self.P = P
        self.G = G
        self.points = np.asarray(points, dtype=np.int64).reshape(-1, dim)
        self.values = np.asarray(values, dtype=np.complex128)
        self.M = None if M is None else np.asarray(M, dtype=np.int64)
        assert self.values.shape == (G ** dim, self.points.shape[0])

    @property
    def thetas(self):
        return torus_grid(self.G, self.dim)

    def norm(self):
        """
        Discrete L2 norm over the torus and the stored points; this is the
        transform norm when the points form a fundamental domain.
        """
        return float(np.sqrt(np.sum(np.abs(self.values) ** 2) / (self.G ** self.dim * self.P ** self.dim)))

    def fiber(self, theta):
        """
        Row of values at the grid quasimomentum theta.
        """
        return self.values[self._row(theta)]

    def _row(self, theta):
        labels = np.atleast_1d(np.asarray(theta, dtype=np.float64)) * self.G / (2 * np.pi)
        rounded = np.round(labels)
        if np.max(np.abs(labels - rounded)) > 1e-8:
            raise GridIncompatible("quasimomentum {} is not on the {}-point torus grid".format(
                np.asarray(theta).tolist(), self.G))
        pos = torus_position(rounded.astype(np.int64), self.G)
        return int(np.ravel_multi_index(tuple(pos), (self.G,) * self.dim))


def cell_points(dim, P):
    return np.array(list(np.ndindex(*(P,) * dim)), dtype=np.int64).reshape(-1, dim)


def _phase_matrix(G, W):
    # E[q, b] = z_q^(W - b), b = W - n
    thetas = 2 * np.pi * (np.arange(G) - G // 2) / G
    n = W - np.arange(2 * W + 1)
    return np.exp(1j * np.outer(thetas, n))


def _blocked(values, dim, P, W):
    shape = []
    for _ in range(dim):
        shape += [2 * W + 1, P]
    arr = values.reshape(shape)
    return arr.transpose(list(range(0, 2 * dim, 2)) + list(range(1, 2 * dim, 2)))


def zak_forward(f, Q):
    """
    F(z_q, u_p) = sum_n z_q^n f(u_p - n).
    """
    if not Q > 2 * f.W:
        raise AliasingWindow("torus grid Q={} must exceed 2W={}".format(Q, 2 * f.W))
    d = f.dim
    E = _phase_matrix(Q, f.W)
    arr = _blocked(f.values, d, f.P, f.W)
    for k in range(d):
        arr = np.moveaxis(np.tensordot(E, arr, axes=([1], [k])), 0, k)
    return ZakArray(d, f.P, Q, cell_points(d, f.P), arr.reshape(Q ** d, f.P ** d))


def zak_inverse(F, W):
    """
    f(u_p - n) = Q^-d sum_q conj(z_q)^n F(z_q, u_p) for |n|_inf <= W.
    """
    if F.M is not None:
        raise GridIncompatible("zak_inverse expects a plain Zak array")
    if not F.G > 2 * W:
        raise AliasingWindow("torus grid Q={} must exceed 2W={}".format(F.G, 2 * W))
    d, P, Q = F.dim, F.P, F.G
    E = _phase_matrix(Q, W).conj().T / Q
    arr = F.values.reshape((Q,) * d + (P,) * d)
    for k in range(d):
        arr = np.moveaxis(np.tensordot(E, arr, axes=([1], [k])), 0, k)
    # (B..., P...) back to interleaved lattice order
    order = []
    for k in range(d):
        order += [k, d + k]
    values = arr.transpose(order).reshape((P * (2 * W + 1),) * d)
    return SampledSignal(d, P, W, values)


class ResidueSystem:
    def __init__(self, M, representatives):
        self.M = np.asarray(M, dtype=np.int64)
        self.representatives = np.asarray(representatives, dtype=np.int64).reshape(-1, self.M.shape[0])
        m = sympy.Matrix(self.M.tolist())
        self.det = int(m.det())
        self._adjugate = np.array(m.adjugate().tolist(), dtype=np.int64)

    @property
    def N(self):
        return abs(self.det)

    def congruent(self, x, y):
        """
        x = y mod M Z^d, i.e. M^-1 (x - y) is integral.
        """
        diff = np.asarray(x, dtype=np.int64) - np.asarray(y, dtype=np.int64)
        return bool(np.all(np.mod(self._adjugate @ diff, self.det) == 0))


def _integer_matrix(M):
    M = np.atleast_2d(np.asarray(M))
    if M.shape[0] != M.shape[1] or not np.all(np.equal(np.mod(M, 1), 0)):
        raise ValueError("expected a square integer matrix, got {}".format(M.tolist()))
    M = M.astype(np.int64)
    if sympy.Matrix(M.tolist()).det() == 0:
        raise SingularMatrix("matrix {} is singular".format(M.tolist()))
    return M


def _triangular_basis(M):
    """
    A triangular matrix whose columns span M Z^d, taken from the Hermite
    normal form of M or of M^T depending on the orientation sympy reduces in.
    """
    m = sympy.Matrix(M.tolist())
    det = m.det()
    adj = m.adjugate()
    for H in (hermite_normal_form(m), hermite_normal_form(m.T).T):
        if H.shape != m.shape or abs(H.det()) != abs(det):
            continue
        if all(_x % det == 0 for _x in adj * H):
            return H
    raise InvariantViolation("no triangular basis found for the lattice of {}".format(M.tolist()))


def residues(M):
    """
    One representative per class of Z^d / M Z^d, from the box spanned by
    the diagonal of the Hermite normal form of M.
    """
    M = _integer_matrix(M)
    H = _triangular_basis(M)
    diag = [abs(int(H[i, i])) for i in range(M.shape[0])]
    reps = np.array(list(itertools.product(*[range(_h) for _h in diag])), dtype=np.int64).reshape(-1, M.shape[0])
    system = ResidueSystem(M, reps)
    if reps.shape[0] != system.N:
        raise InvariantViolation("found {} residues for determinant {}".format(reps.shape[0], system.N))
    for a, b in itertools.combinations(range(reps.shape[0]), 2):
        if system.congruent(reps[a], reps[b]):
            raise InvariantViolation("residues {} and {} are congruent mod M".format(reps[a].tolist(), reps[b].tolist()))
    return system


def is_congruent(x, y, M):
    return ResidueSystem(_integer_matrix(M), np.zeros((0, np.atleast_2d(M).shape[0]))).congruent(x, y)


def wrap_theta(theta):
    wrapped = np.mod(np.asarray(theta, dtype=np.float64) + np.pi, 2 * np.pi) - np.pi
    return np.where(wrapped >= np.pi, wrapped - 2 * np.pi, wrapped)


def root_thetas(theta, M):
    """
    The |det M| quasimomenta theta_w in [-pi, pi)^d with w^M = z:
    theta_w = (M^T)^-1 (theta + 2 pi j), j over the residues of M^T.
    """
    M = _integer_matrix(M)
    theta = np.atleast_1d(np.asarray(theta, dtype=np.float64))
    reps = residues(M.T).representatives
    inv = np.linalg.inv(M.T.astype(np.float64))
    return wrap_theta((theta[None, :] + 2 * np.pi * reps) @ inv.T)


def fundamental_domain(M, P):
    """
    Lattice numerators r with M r / P in [0, 1)^d; there are P^d / |det M| of them.
    """
    M = _integer_matrix(M)
    d = M.shape[0]
    inv = np.linalg.inv(M.astype(np.float64))
    corners = np.array(list(itertools.product([0, 1], repeat=d)), dtype=np.float64) @ inv.T * P
    lo = np.floor(corners.min(axis=0)).astype(np.int64) - 1
    hi = np.ceil(corners.max(axis=0)).astype(np.int64) + 1
    box = np.array(list(itertools.product(*[range(_l, _h + 1) for _l, _h in zip(lo, hi)])), dtype=np.int64)
    image = box @ M.T
    keep = np.all((image >= 0) & (image < P), axis=1)
    return box[keep]


def _check_lattice(M, P):
    N = abs(int(round(np.linalg.det(M))))
    if P % N:
        raise GridIncompatible("cell resolution P={} must be a multiple of |det M|={}".format(P, N))
    return N


def zak_forward_general(f, M, Q, points=None):
    """
    F_M(w, x_r) = sum_n w^n f(x_r - M^-1 n) on the (N Q)-point torus grid.

    `points` are lattice numerators r (default: the unit cell grid); use
    fundamental_domain(M, P) for the unitary picture.
    """
    M = _integer_matrix(M)
    d = f.dim
    N = _check_lattice(M, f.P)
    G = N * Q
    points = cell_points(d, f.P) if points is None else np.asarray(points, dtype=np.int64).reshape(-1, d)
    support = lattice_coordinates(d, f.P, f.W).reshape(-1, d)
    amps = f.values.reshape(-1)
    nonzero = amps != 0
    support, amps = support[nonzero], amps[nonzero]

    values = np.zeros((G ** d, points.shape[0]), dtype=np.complex128)
    if support.shape[0] == 0:
        return ZakArray(d, f.P, G, points, values, M)
    thetas = torus_grid(G, d)
    for col, r in enumerate(points):
        num = (r[None, :] - support) @ M.T
        hit = np.all(np.mod(num, f.P) == 0, axis=1)
        if not np.any(hit):
            continue
        n = num[hit] // f.P
        if np.any(n.max(axis=0) - n.min(axis=0) >= G):
            raise AliasingWindow("translates of the signal alias on the {}-point torus grid".format(G))
        values[:, col] = np.exp(1j * thetas @ n.T) @ amps[hit]
    return ZakArray(d, f.P, G, points, values, M)


def _power_theta(theta_w, M):
    # exponent of w^M
    return wrap_theta(np.asarray(M).T @ np.atleast_1d(theta_w))


def _residue_sum(values_at_z, points, P, theta_z, M, theta_w, reps):
    """
    sum_p w^-p F(z, x + M^-1 p), the quasi-periodic extension F(z, u + n) = z^n F(z, u)
    taking the shifted points back into the cell.
    """
    d = points.shape[1]
    lookup = {tuple(_r): _i for _i, _r in enumerate(points.tolist())}
    det = int(round(np.linalg.det(M)))
    adj = np.round(np.linalg.inv(M.astype(np.float64)) * det).astype(np.int64)
    out = np.zeros(points.shape[0], dtype=np.complex128)
    for p in reps:
        shift = (adj @ p) * P // det
        target = points + shift[None, :]
        n = np.floor_divide(target, P)
        cell = target - n * P
        try:
            idx = np.array([lookup[tuple(_c)] for _c in cell.tolist()], dtype=np.int64)
        except KeyError:
            raise GridIncompatible("the points do not cover the unit cell grid")
        phase = np.exp(-1j * np.dot(theta_w, p)) * np.exp(1j * n @ theta_z)
        out += phase * values_at_z[idx]
    return out


def zak_embed(F, M, theta_w):
    """
    F_M(w, x) = sum_{p in Z^d / M Z^d} w^-p F(w^M, x + M^-1 p).
    """
    M = _integer_matrix(M)
    _check_lattice(M, F.P)
    theta_w = np.atleast_1d(np.asarray(theta_w, dtype=np.float64))
    theta_z = _power_theta(theta_w, M)
    reps = residues(M).representatives
    return _residue_sum(F.fiber(theta_z), F.points, F.P, theta_z, M, theta_w, reps)


def zak_project(values, P, points, theta_z, M, theta_w):
    """
    (P_w F)(u) = N^-1 sum_p w^-p F(z, u + M^-1 p) for one fiber F(z, .) on the cell grid.
    """
    M = _integer_matrix(M)
    N = _check_lattice(M, P)
    theta_w = np.atleast_1d(np.asarray(theta_w, dtype=np.float64))
    theta_z = np.atleast_1d(np.asarray(theta_z, dtype=np.float64))
    if np.max(np.abs(wrap_theta(_power_theta(theta_w, M) - theta_z))) > 1e-9:
        raise GridIncompatible("w^M does not equal z")
    reps = residues(M).representatives
    points = np.asarray(points, dtype=np.int64).reshape(-1, M.shape[0])
    return _residue_sum(np.asarray(values), points, P, theta_z, M, theta_w, reps) / N


def zak_refine_mean(F_M, M, Q=None):
    """
    F(z, x) = N^-1 sum_{w^M = z} F_M(w, x) on the Q-point grid, Q = G / N by default.
    """
    M = _integer_matrix(M)
    d = M.shape[0]
    N = abs(int(round(np.linalg.det(M))))
    if Q is None:
        if F_M.G % N:
            raise GridIncompatible("torus grid of {} points is not refined by N={}".format(F_M.G, N))
        Q = F_M.G // N
    if F_M.G != N * Q:
        raise GridIncompatible("Z_M grid has {} points per axis, expected N Q = {}".format(F_M.G, N * Q))
    thetas = torus_grid(Q, d)
    values = np.zeros((Q ** d, F_M.points.shape[0]), dtype=np.complex128)
    for row, theta in enumerate(thetas):
        for theta_w in root_thetas(theta, M):
            values[row] += F_M.fiber(theta_w)
    return ZakArray(d, F_M.P, Q, F_M.points, values / N)
