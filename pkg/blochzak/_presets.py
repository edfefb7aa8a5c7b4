# Copyright (c) blochzak contributors. All rights reserved.
# Licensed under the MIT License. See License.txt in the project root for
# license information.
###############################################################################

from ._coeffs import CoefficientField, OperatorSpec, constant, cosine
from ._spectral import schrodinger_spec


def _diagonal(field, dim):
    return [[field if i == j else None for j in range(dim)] for i in range(dim)]


def free_1d():
    return OperatorSpec(1, [[constant(1.0)]], self_adjoint=True)


def cos_1d():
    # c(x) = 2 + cos 2 pi x, homogenizes to sqrt(3)
    return OperatorSpec(1, [[constant(2.0) + cosine(1.0, 1)]], self_adjoint=True)


def mathieu():
    return schrodinger_spec(cosine(2.0, 1))


def const_v(value=1.0):
    return schrodinger_spec(constant(value))


def checkerboard_2d():
    # (2 + cos 2 pi x1) (2 + cos 2 pi x2) on the diagonal
    a = constant(2.0, 2) + cosine(1.0, (1, 0))
    b = constant(2.0, 2) + cosine(1.0, (0, 1))
    product = CoefficientField.from_terms(2, [
        ((k1[0], k2[1]), v1 * v2) for k1, v1 in a.terms().items() for k2, v2 in b.terms().items()], real=True)
    return OperatorSpec(2, _diagonal(product, 2), self_adjoint=True)


PRESETS = {
    'free-1d': free_1d,
    'cos-1d': cos_1d,
    'mathieu': mathieu,
    'const-v': const_v,
    'checkerboard-2d': checkerboard_2d,
}


def get_preset(name):
    try:
        return PRESETS[name]()
    except KeyError:
        raise ValueError("unknown preset '{}', choose from {}".format(name, ', '.join(sorted(PRESETS))))


def list_presets():
    return sorted(PRESETS)
