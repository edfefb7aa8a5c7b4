# Copyright (c) blochzak contributors. All rights reserved.
# Licensed under the MIT License. See License.txt in the project root for
# license information.
###############################################################################

"""
Exceptions raised by blochzak.

Validation problems with the inputs derive from ValueError, numerical
failures and broken identities derive from RuntimeError. The command line
maps the first group to exit code 2 and the second one to exit code 3.
"""


class BlochZakError(Exception):
    pass


class NotElliptic(BlochZakError, ValueError):
    pass


class SelfAdjointViolation(BlochZakError, ValueError):
    pass


class SingularMatrix(BlochZakError, ValueError):
    pass


class NotHermitian(BlochZakError, ValueError):
    pass


class NonpositiveTime(BlochZakError, ValueError):
    pass


class AliasingWindow(BlochZakError, ValueError):
    pass


class GridIncompatible(BlochZakError, ValueError):
    pass


class TruncationMismatch(BlochZakError, ValueError):
    pass


class NotPureSecondOrder(BlochZakError, ValueError):
    pass


class NotSelfAdjoint(BlochZakError, ValueError):
    pass


class NotRealPotential(BlochZakError, ValueError):
    pass


class ConvergenceFailure(BlochZakError, RuntimeError):
    pass


class SingularCellProblem(BlochZakError, RuntimeError):
    pass


class InvariantViolation(BlochZakError, RuntimeError):
    pass


def is_validation_error(exc):
    return isinstance(exc, BlochZakError) and isinstance(exc, ValueError)
