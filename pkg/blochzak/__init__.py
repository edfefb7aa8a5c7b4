# Copyright (c) blochzak contributors. All rights reserved.
# Licensed under the MIT License. See License.txt in the project root for
# license information.
###############################################################################

"""
Bloch/Zak spectral decomposition of periodic second-order elliptic operators.
"""

import pathlib
from ._version import __version__
from ._errors import *  # noqa
from ._coeffs import CoefficientField, OperatorSpec, EllipticityReport  # noqa
from ._coeffs import evaluate, validate, rescale, shift_zeroth, ellipticity_shift  # noqa
from ._coeffs import constant, cosine, sine, to_samples, from_samples, multi_indices  # noqa
from ._fiber import Quasimomentum, PlaneWaveBasis, FiberMatrix  # noqa
from ._fiber import assemble, assemble_homogenized, torus_grid, write_matrix_csv, write_matrix_npy  # noqa
from ._spectral import EigenSystem, BandStructure, BandReport  # noqa
from ._spectral import eig_hermitian, band_sweep, band_report, band_multiplicity  # noqa
from ._spectral import schrodinger_spec, potential_gap_bound  # noqa
from ._homog import HomogenizedOperator, CellSolution, cell_solve, homogenize, cutoff_stability  # noqa
from ._semigroup import FiberSemigroup, KernelGrid, heat, heat_fiber, heat_general  # noqa
from ._semigroup import trace_norm, hs_norm, operator_norm, check_trace_hs_inequalities  # noqa
from ._semigroup import kernel_fiber, kernel_line, gaussian_bound_fit, scaling_check  # noqa
from ._semigroup import homog_convergence, kernel_convergence, resolvent_convergence  # noqa
from ._semigroup import fiber_continuity, heat_paths_agree, cell_grid  # noqa
from ._zak import SampledSignal, ZakArray, ResidueSystem  # noqa
from ._zak import zak_forward, zak_inverse, zak_forward_general, zak_refine_mean  # noqa
from ._zak import zak_embed, zak_project, residues, root_thetas, is_congruent, fundamental_domain  # noqa
from ._refine import RefinedSpectrum, refined_spectrum, refinement_check, refinement_limit  # noqa
from ._presets import get_preset, list_presets  # noqa
from ._config import RunConfig  # noqa


def get_test_data_file(case_file, *sub_dirs):
    test_dir = pathlib.Path(case_file).parent
    return str(test_dir.joinpath(*sub_dirs))
