# Copyright (c) blochzak contributors. All rights reserved.
# Licensed under the MIT License. See License.txt in the project root for
# license information.
###############################################################################

"""
Periodic coefficient fields and operator data.

A coefficient field is a trigonometric polynomial on the unit cell, stored by
its Fourier amplitudes g[k] for |k|_inf <= F. An OperatorSpec bundles the
coefficients of

    H = -sum_ij d_i c_ij d_j + sum_i c_i d_i + sum_i d_i c'_i + c_0

with periods equal to one.
"""

import itertools
import numpy as np

from ._errors import NotElliptic, SelfAdjointViolation, SingularMatrix, NotPureSecondOrder


HERMITIAN_TOL = 1e-10


def multi_indices(cutoff, dim):
    """
    All integer multi-indices k with |k|_inf <= cutoff, in lexicographic order.
    """
    rng = range(-cutoff, cutoff + 1)
    return np.array(list(itertools.product(rng, repeat=dim)), dtype=np.int64).reshape(-1, dim)


class CoefficientField:
    def __init__(self, dim, cutoff, amplitudes=None, real=False):
        if dim < 1:
            raise ValueError("dimension must be positive, got {}".format(dim))
        if cutoff < 0:
            raise ValueError("cutoff must be non-negative, got {}".format(cutoff))
        shape = (2 * cutoff + 1,) * dim
        if amplitudes is None:
            amplitudes = np.zeros(shape, dtype=np.complex128)
        amplitudes = np.array(amplitudes, dtype=np.complex128).reshape(shape)
        if real:
            # g[-k] = conj(g[k])
            gap = np.max(np.abs(amplitudes - np.conj(amplitudes[(slice(None, None, -1),) * dim])), initial=0.0)
            if gap > HERMITIAN_TOL * max(1.0, float(np.max(np.abs(amplitudes), initial=0.0))):
                raise ValueError("field flagged real has g[-k] != conj(g[k]) (deviation {:.3g})".format(gap))
        amplitudes.setflags(write=False)
        self._dim = dim
        self._cutoff = cutoff
        self._amplitudes = amplitudes
        self._real = bool(real)

    @property
    def dim(self):
        return self._dim

    @property
    def cutoff(self):
        return self._cutoff

    @property
    def real(self):
        return self._real

    @property
    def amplitudes(self):
        return self._amplitudes

    @classmethod
    def from_terms(cls, dim, terms, real=False):
        """
        Build a field from (multi-index, amplitude) pairs. Repeated indices add up.
        """
        terms = [(tuple(int(_i) for _i in np.atleast_1d(k)), complex(v)) for k, v in terms]
        for k, _ in terms:
            if len(k) != dim:
                raise ValueError("multi-index {} does not match dimension {}".format(k, dim))
        cutoff = max([max(abs(_i) for _i in k) for k, _ in terms], default=0)
        amps = np.zeros((2 * cutoff + 1,) * dim, dtype=np.complex128)
        for k, v in terms:
            amps[tuple(_i + cutoff for _i in k)] += v
        return cls(dim, cutoff, amps, real=real)

    def terms(self, tol=0.0):
        """
        Mapping multi-index -> amplitude of the stored nonzero amplitudes.
        """
        result = {}
        for idx in zip(*np.nonzero(np.abs(self._amplitudes) > tol)):
            result[tuple(int(_i) - self._cutoff for _i in idx)] = complex(self._amplitudes[idx])
        return result

    def lookup(self, indices):
        """
        Amplitudes at an integer array of multi-indices (last axis is the
        dimension); indices outside the stored cutoff give zero.
        """
        indices = np.asarray(indices, dtype=np.int64)
        out = np.zeros(indices.shape[:-1], dtype=np.complex128)
        inside = np.all(np.abs(indices) <= self._cutoff, axis=-1)
        if np.any(inside):
            sel = indices[inside] + self._cutoff
            out[inside] = self._amplitudes[tuple(sel.T)]
        return out

    def mean(self):
        return complex(self._amplitudes[(self._cutoff,) * self._dim])

    def is_zero(self):
        return not np.any(self._amplitudes)

    def is_constant(self):
        return self.terms().keys() <= {(0,) * self._dim}

    def reflect_conj(self):
        """
        The field x -> conj(g(x)), amplitude k -> conj(g[-k]).
        """
        return CoefficientField(self._dim, self._cutoff, np.conj(self._amplitudes[(slice(None, None, -1),) * self._dim]),
                                real=self._real)

    def is_real_valued(self, tol=HERMITIAN_TOL):
        return np.max(np.abs(self._amplitudes - self.reflect_conj().amplitudes), initial=0.0) <= tol

    def padded(self, cutoff):
        assert cutoff >= self._cutoff
        amps = np.zeros((2 * cutoff + 1,) * self._dim, dtype=np.complex128)
        pad = cutoff - self._cutoff
        amps[(slice(pad, pad + 2 * self._cutoff + 1),) * self._dim] = self._amplitudes
        return amps

    def __add__(self, other):
        if not isinstance(other, CoefficientField):
            other = constant(other, self._dim)
        if other.dim != self._dim:
            raise ValueError("cannot add fields of dimensions {} and {}".format(self._dim, other.dim))
        cutoff = max(self._cutoff, other.cutoff)
        return CoefficientField(self._dim, cutoff, self.padded(cutoff) + other.padded(cutoff),
                                real=self._real and other.real)

    __radd__ = __add__

    def __mul__(self, scalar):
        scalar = complex(scalar)
        return CoefficientField(self._dim, self._cutoff, self._amplitudes * scalar,
                                real=self._real and scalar.imag == 0.0)

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1.0

    def __repr__(self):
        return "CoefficientField(dim={}, cutoff={}, real={}, terms={})".format(
            self._dim, self._cutoff, self._real, self.terms())


def constant(value, dim=1):
    value = complex(value)
    return CoefficientField(dim, 0, [value], real=value.imag == 0.0)


def zero_field(dim):
    return constant(0.0, dim)


def cosine(amplitude, k, dim=None):
    """
    amplitude * cos(2 pi k.x)
    """
    k = tuple(np.atleast_1d(k).tolist())
    dim = dim or len(k)
    minus = tuple(-_i for _i in k)
    return CoefficientField.from_terms(dim, [(k, amplitude / 2.0), (minus, amplitude / 2.0)], real=True)


def sine(amplitude, k, dim=None):
    """
    amplitude * sin(2 pi k.x)
    """
    k = tuple(np.atleast_1d(k).tolist())
    dim = dim or len(k)
    minus = tuple(-_i for _i in k)
    return CoefficientField.from_terms(dim, [(k, -0.5j * amplitude), (minus, 0.5j * amplitude)], real=True)


def evaluate(field, points):
    """
    Sum the Fourier series of the field at points of the unit cell.
    """
    points = np.asarray(points, dtype=np.float64).reshape(-1, field.dim)
    ks = multi_indices(field.cutoff, field.dim)
    amps = field.amplitudes.reshape(-1)
    values = np.exp(2j * np.pi * points @ ks.T) @ amps
    if field.real:
        values = values.real + 0j
    return values


def to_samples(field, n):
    """
    Values of the field on the uniform grid p/n, p in [0, n)^d, as a d-dimensional array.
    """
    if n < 2 * field.cutoff + 1:
        raise ValueError("grid of {} points cannot resolve cutoff {}".format(n, field.cutoff))
    arr = np.zeros((n,) * field.dim, dtype=np.complex128)
    ks = multi_indices(field.cutoff, field.dim)
    arr[tuple((ks % n).T)] = field.amplitudes.reshape(-1)
    values = np.fft.ifftn(arr) * n ** field.dim
    if field.real:
        values = values.real + 0j
    return values


def from_samples(values, cutoff, real=False):
    """
    Fourier amplitudes |k|_inf <= cutoff of uniformly sampled periodic data.
    """
    values = np.asarray(values, dtype=np.complex128)
    dim = values.ndim
    n = values.shape[0]
    if n < 2 * cutoff + 1:
        raise ValueError("{} samples per axis cannot resolve cutoff {}".format(n, cutoff))
    spectrum = np.fft.fftn(values) / n ** dim
    ks = multi_indices(cutoff, dim)
    amps = spectrum[tuple((ks % n).T)]
    return CoefficientField(dim, cutoff, amps, real=real)


class OperatorSpec:
    """
    Coefficients of a periodic second-order operator.

    `principal` is a d x d nested list of fields, `first_order` is a pair
    (c, c') of length-d lists, `zeroth` is c_0. Missing coefficients are zero.
    """

    def __init__(self, dim, principal, first_order=None, zeroth=None,
                 self_adjoint=False, pure_second_order=None):
        self._dim = dim
        principal = [[_as_field(principal[i][j], dim) for j in range(dim)] for i in range(dim)]
        if first_order is None:
            first_order = ([None] * dim, [None] * dim)
        c, c_prime = first_order
        c = [_as_field(c[i] if c is not None else None, dim) for i in range(dim)]
        c_prime = [_as_field(c_prime[i] if c_prime is not None else None, dim) for i in range(dim)]
        self._principal = principal
        self._first = c
        self._first_prime = c_prime
        self._zeroth = _as_field(zeroth, dim)
        self._self_adjoint = bool(self_adjoint)
        has_lower = not self.lower_order_vanishes()
        if pure_second_order is None:
            pure_second_order = not has_lower
        if pure_second_order and has_lower:
            raise NotPureSecondOrder(
                "operator flagged pure second-order but has nonzero lower-order coefficients")
        self._pure = bool(pure_second_order)

    @property
    def dim(self):
        return self._dim

    @property
    def principal(self):
        return self._principal

    @property
    def first_order(self):
        return self._first, self._first_prime

    @property
    def zeroth(self):
        return self._zeroth

    @property
    def self_adjoint(self):
        return self._self_adjoint

    @property
    def pure_second_order(self):
        return self._pure

    @property
    def cutoff(self):
        return max(_f.cutoff for _f in self.fields())

    def fields(self):
        for row in self._principal:
            yield from row
        yield from self._first
        yield from self._first_prime
        yield self._zeroth

    def lower_order_vanishes(self):
        return all(_f.is_zero() for _f in self._first + self._first_prime + [self._zeroth])

    def replace(self, **kwargs):
        args = dict(dim=self._dim, principal=self._principal,
                    first_order=(self._first, self._first_prime), zeroth=self._zeroth,
                    self_adjoint=self._self_adjoint, pure_second_order=None)
        args.update(kwargs)
        return OperatorSpec(**args)

    def map_fields(self, func):
        return OperatorSpec(
            self._dim,
            [[func(_f) for _f in row] for row in self._principal],
            ([func(_f) for _f in self._first], [func(_f) for _f in self._first_prime]),
            func(self._zeroth),
            self_adjoint=self._self_adjoint)

    def __repr__(self):
        return "OperatorSpec(dim={}, cutoff={}, self_adjoint={}, pure_second_order={})".format(
            self._dim, self.cutoff, self._self_adjoint, self._pure)


def _as_field(value, dim):
    if value is None:
        return zero_field(dim)
    if isinstance(value, CoefficientField):
        if value.dim != dim:
            raise ValueError("coefficient of dimension {} in an operator of dimension {}".format(value.dim, dim))
        return value
    return constant(value, dim)


class EllipticityReport:
    def __init__(self, lambda_C, class_norm, first_order_norm=0.0, zeroth_norm=0.0):
        self.lambda_C = lambda_C
        self.class_norm = class_norm
        self.first_order_norm = first_order_norm
        self.zeroth_norm = zeroth_norm

    def __repr__(self):
        return "EllipticityReport(lambda_C={:.15g}, class_norm={:.15g})".format(self.lambda_C, self.class_norm)


def check_self_adjoint(spec, tol=HERMITIAN_TOL):
    """
    Raise SelfAdjointViolation unless c_ji = conj(c_ij), c' = -conj(c) and c_0 is real.
    """
    d = spec.dim
    for i in range(d):
        for j in range(i, d):
            diff = _amplitude_gap(spec.principal[j][i], spec.principal[i][j].reflect_conj())
            if diff > tol:
                raise SelfAdjointViolation(
                    "c[{}][{}] is not the conjugate of c[{}][{}] (deviation {:.3g})".format(j, i, i, j, diff))
    c, c_prime = spec.first_order
    for i in range(d):
        diff = _amplitude_gap(c_prime[i], -c[i].reflect_conj())
        if diff > tol:
            raise SelfAdjointViolation(
                "c'[{}] is not -conj(c[{}]) (deviation {:.3g})".format(i, i, diff))
    diff = _amplitude_gap(spec.zeroth, spec.zeroth.reflect_conj())
    if diff > tol:
        raise SelfAdjointViolation("c0 is not real (deviation {:.3g})".format(diff))


def _amplitude_gap(f, g):
    cutoff = max(f.cutoff, g.cutoff)
    return float(np.max(np.abs(f.padded(cutoff) - g.padded(cutoff)), initial=0.0))


def validate(spec, grid_resolution=64):
    if grid_resolution < 2 * spec.cutoff + 1:
        raise ValueError("grid_resolution {} is below 2F+1 = {}".format(grid_resolution, 2 * spec.cutoff + 1))
    d = spec.dim
    n = grid_resolution
    samples = np.empty((n ** d, d, d), dtype=np.complex128)
    sup_principal = 0.0
    for i in range(d):
        for j in range(d):
            values = to_samples(spec.principal[i][j], n).reshape(-1)
            samples[:, i, j] = values
            sup_principal += np.max(np.abs(values))
    sym = (samples + np.conj(np.transpose(samples, (0, 2, 1)))) / 2.0
    lambda_C = float(np.min(np.linalg.eigvalsh(sym)))
    if lambda_C <= 0.0:
        raise NotElliptic("smallest eigenvalue of Re C on the sample grid is {:.6g}".format(lambda_C))
    if spec.self_adjoint:
        check_self_adjoint(spec)

    c, c_prime = spec.first_order
    first_norm = sum(float(np.max(np.abs(to_samples(_f, n)))) for _f in c + c_prime)
    zeroth_norm = float(np.max(np.abs(to_samples(spec.zeroth, n))))
    class_norm = 1.0 / lambda_C + sup_principal + first_norm + zeroth_norm
    return EllipticityReport(lambda_C, class_norm, first_norm, zeroth_norm)


def _as_integer_matrix(M, dim):
    arr = np.atleast_2d(np.asarray(M))
    if arr.shape != (dim, dim):
        raise ValueError("expected a {0}x{0} matrix, got shape {1}".format(dim, arr.shape))
    if not np.all(np.equal(np.mod(arr, 1), 0)):
        raise ValueError("matrix {} is not integral".format(arr.tolist()))
    arr = arr.astype(np.int64)
    if round(np.linalg.det(arr)) == 0:
        raise SingularMatrix("matrix {} is singular".format(arr.tolist()))
    return arr


def rescale_field(field, M):
    """
    The field x -> g(M x): amplitude at M^T k equals the old amplitude at k.
    """
    M = _as_integer_matrix(M, field.dim)
    terms = field.terms()
    if not terms:
        return CoefficientField(field.dim, 0, real=field.real)
    cutoff = int(np.max(np.abs(M.T).sum(axis=1))) * field.cutoff
    amps = np.zeros((2 * cutoff + 1,) * field.dim, dtype=np.complex128)
    for k, v in terms.items():
        target = M.T @ np.array(k, dtype=np.int64)
        amps[tuple(target + cutoff)] += v
    return CoefficientField(field.dim, cutoff, amps, real=field.real)


def rescale(spec, M):
    if np.isscalar(M):
        M = int(M) * np.eye(spec.dim, dtype=np.int64)
    M = _as_integer_matrix(M, spec.dim)
    return spec.map_fields(lambda f: rescale_field(f, M))


def shift_zeroth(spec, mu):
    """
    Add the constant mu to c_0.
    """
    mu = complex(mu)
    if spec.self_adjoint and mu.imag != 0.0:
        raise SelfAdjointViolation("a complex shift {} breaks self-adjointness".format(mu))
    return spec.replace(zeroth=spec.zeroth + mu)


def ellipticity_shift(report):
    """
    A shift mu for c_0 after which the real part of the form is non-negative.
    """
    return report.first_order_norm ** 2 / report.lambda_C + report.zeroth_norm
