# Copyright (c) blochzak contributors. All rights reserved.
# Licensed under the MIT License. See License.txt in the project root for
# license information.
###############################################################################

import sys
import fire
import numpy as np

from ._errors import BlochZakError, InvariantViolation, is_validation_error
from ._config import RunConfig, OutputBundle, resolve_operator
from ._coeffs import OperatorSpec, validate, shift_zeroth, constant
from ._fiber import assemble, assemble_homogenized
from ._spectral import band_sweep, band_report, eig_hermitian
from ._homog import homogenize, cutoff_stability
from ._semigroup import (heat, heat_fiber, trace_norm, hs_norm, check_trace_hs_inequalities, homog_convergence,
                         kernel_line, gaussian_bound_fit, scaling_check)
from ._zak import (SampledSignal, zak_forward, zak_inverse, zak_forward_general, zak_refine_mean,
                   zak_embed, fundamental_domain, residues)
from ._refine import refinement_check, refinement_limit


class BlochZakCommands:
    def __init__(self, config=None, out=None, preset=None, threads=None, tolerance_profile=None, quiet=False):
        self._config_file = config
        self._overrides = dict(out=out, preset=preset, threads=threads, tolerance_profile=tolerance_profile)
        self._quiet = quiet

    def _log(self, msg):
        if not self._quiet:
            print("[blochzak] {}".format(msg))

    def _setup(self, params):
        overrides = dict(self._overrides)
        overrides.update(params)
        if self._config_file:
            cfg = RunConfig.from_file(self._config_file, **overrides)
        else:
            cfg = RunConfig(**{_k: _v for _k, _v in overrides.items() if _v is not None})
        spec = resolve_operator(cfg)
        validate(spec, max(64, 2 * spec.cutoff + 1))
        return cfg, spec, OutputBundle(cfg.out, cfg, cfg.formats)

    def bands(self, **params):
        """
        Band structure on a G^d quasimomentum grid and the gap report.
        """
        cfg, spec, bundle = self._setup(params)
        bs = band_sweep(spec, cfg.G, cfg.K, cfg.n_max, cfg.thread_count)
        report = band_report(bs)
        d = spec.dim
        header = ['theta_{}'.format(_i) for _i in range(d)] + ['n', 'lambda']
        rows = []
        for theta, values in zip(bs.theta_grid, bs.bands):
            for n, lam in enumerate(values):
                rows.append(list(theta) + [n, lam])
        bundle.write_csv('bands.csv', header, rows)
        bundle.write_json('band_report.json', report.to_dict())
        for n, gap in report.gaps:
            self._log("gap {} -> {}: {:.15g}".format(n, n + 1, gap))

    def homogenize(self, symmetrize=False, **params):
        """
        Homogenized coefficients from the cell problem and their cutoff stability.
        """
        cfg, spec, bundle = self._setup(params)
        h = homogenize(spec, cfg.K, symmetrize=symmetrize)
        table = cutoff_stability(spec, [max(1, cfg.K - 8), cfg.K, cfg.K + 8], symmetrize=symmetrize)
        rows = []
        for K, C_hat in table:
            for i in range(spec.dim):
                for j in range(spec.dim):
                    rows.append([K, i, j, C_hat[i, j].real, C_hat[i, j].imag])
        bundle.write_csv('cutoff_stability.csv', ['K', 'i', 'j', 'C_hat_re', 'C_hat_im'], rows)
        bundle.write_json('homogenized.json', {'homogenized': h.to_dict()})
        self._log("C_hat = {}".format(np.array2string(h.C_hat, precision=12)))

    def refine(self, **params):
        """
        Refinement exactness at N and the deviation curve over N_list.
        """
        cfg, spec, bundle = self._setup(params)
        theta = np.atleast_1d(cfg.theta) * np.ones(spec.dim)
        K_fiber = max(1, cfg.K // 2)
        deviation = refinement_check(spec, theta, cfg.N, K_fiber, cfg.thread_count)
        rows = refinement_limit(spec, theta, cfg.N_list, cfg.n_show, K_fiber, cfg.K, cfg.thread_count)
        bundle.write_csv('refinement_limit.csv', ['N', 'deviation'], [[_r.N, _r.deviation] for _r in rows])
        bundle.write_json('refinement.json', {
            'check': {'N': cfg.N, 'K_fiber': K_fiber, 'deviation': deviation},
            'limit': [_r.to_dict() for _r in rows]})
        self._log("refinement check N={}: {:.3e}".format(cfg.N, deviation))
        for r in rows:
            self._log("N={:<4d} deviation {:.15g}".format(r.N, r.deviation))
        if deviation > cfg.tolerances['refine']:
            raise InvariantViolation("refinement identity off by {:.3e}".format(deviation))

    def heat(self, **params):
        """
        Trace / Hilbert-Schmidt inequalities and the convergence table per t and m.
        """
        cfg, spec, bundle = self._setup(params)
        theta = np.atleast_1d(cfg.theta) * np.ones(spec.dim)
        h = homogenize(spec, cfg.K)
        fm = assemble(spec, theta, cfg.K)
        hat_fm = assemble_homogenized(h, theta, cfg.K)
        inequalities = {}
        rows = []
        for t in cfg.t_list:
            report = check_trace_hs_inequalities(heat(fm, t), heat(fm, t / 2), heat(hat_fm, t), heat(hat_fm, t / 2))
            inequalities[str(t)] = report.to_dict()
            for row in homog_convergence(spec, theta, t, cfg.m_list, cfg.K, threads=cfg.thread_count):
                rows.append([t, row.m, row.trace_distance, row.hs_distance, row.eigen_sum])
                self._log("t={} m={} trace distance {:.6e}".format(t, row.m, row.trace_distance))
        bundle.write_csv('heat_convergence.csv', ['t', 'm', 'trace_distance', 'hs_distance', 'eigen_sum'], rows)
        bundle.write_json('heat_report.json', {'inequalities': inequalities, 'convergence': rows})

    def kernel(self, **params):
        """
        Line heat kernel on a grid around the origin, Gaussian fit and scaling check.
        """
        cfg, spec, bundle = self._setup(params)
        d = spec.dim
        axis = np.arange(-cfg.W // 2, cfg.W // 2 + 1, 1.0 / cfg.P)
        pts = np.stack(np.meshgrid(*([axis] * d), indexing='ij'), axis=-1).reshape(-1, d)
        kg = kernel_line(spec, cfg.t, cfg.W, cfg.Q, pts, pts, cfg.K, cfg.thread_count)
        a = gaussian_bound_fit(kg, cfg.t, cfg.b)
        payload = {'gaussian_fit': {'b': cfg.b, 'a': a}}
        if spec.lower_order_vanishes():
            payload['scaling_deviation'] = {
                str(_m): scaling_check(spec, _m, cfg.t, W=cfg.W, Q=cfg.Q, K=cfg.K, threads=cfg.thread_count)
                for _m in cfg.m_list}
        rows = []
        for i, x in enumerate(kg.x):
            for j, y in enumerate(kg.y):
                v = kg.values[i, j]
                rows.append(list(x) + list(y) + [v.real, v.imag])
        header = ['x_{}'.format(_i) for _i in range(d)] + ['y_{}'.format(_i) for _i in range(d)] + ['re', 'im']
        bundle.write_csv('kernel.csv', header, rows)
        bundle.write_json('kernel_report.json', payload)
        self._log("Gaussian fit a = {:.15g} at b = {}".format(a, cfg.b))

    def zak(self, **params):
        """
        Round trip, Parseval and refinement identities on a random signal.
        """
        overrides = dict(self._overrides)
        overrides.update(params)
        cfg = RunConfig(**{_k: _v for _k, _v in overrides.items() if _v is not None})
        bundle = OutputBundle(cfg.out, cfg, cfg.formats)
        report = _zak_report(cfg)
        bundle.write_json('zak_report.json', report)
        for key, value in sorted(report.items()):
            self._log("{}: {:.3e}".format(key, value))
        if max(report.values()) > cfg.tolerances['zak']:
            raise InvariantViolation("Zak identities off by {:.3e}".format(max(report.values())))

    def check(self, **params):
        """
        Run the invariant suite on the configured operator; exits with code 3 on a violation.
        """
        cfg, spec, bundle = self._setup(params)
        results = _invariant_suite(cfg, spec)
        bundle.write_json('check.json', {'results': results})
        failed = [_k for _k, (_v, _ok) in results.items() if not _ok]
        for key, (value, ok) in sorted(results.items()):
            self._log("{:<28s} {:.3e} {}".format(key, value, 'ok' if ok else 'FAILED'))
        if failed:
            raise InvariantViolation("invariant checks failed: {}".format(', '.join(failed)))

    def selfcheck(self):
        cfg = RunConfig(preset='cos-1d', K=8, out=self._overrides['out'] or 'blochzak_out', formats=[])
        spec = resolve_operator(cfg)
        results = _invariant_suite(cfg, spec)
        if not all(_ok for _v, _ok in results.values()):
            raise InvariantViolation("selfcheck failed")
        print("The blochzak invariants hold, status: OK.")


def _zak_report(cfg):
    M = np.atleast_2d(cfg.M if cfg.M is not None else [[cfg.N]]).astype(np.int64)
    d = M.shape[0]
    N = abs(residues(M).det)
    P = cfg.P * N if cfg.P % N else cfg.P
    W = cfg.W
    Q = max(cfg.Q, 2 * W + 2)
    f = SampledSignal.random(d, P, W, np.random.default_rng(0))
    F = zak_forward(f, Q)
    round_trip = float(np.max(np.abs(zak_inverse(F, W).values - f.values)))
    parseval = abs(F.norm() - f.norm())
    # the translates n = M (x - s) spread over at most |M|_inf (2W + 2) values per axis
    QM = max(Q, int(np.max(np.abs(M).sum(axis=1))) * (2 * W + 2))
    F_M = zak_forward_general(f, M, QM)
    mean_err = float(np.max(np.abs(zak_refine_mean(F_M, M).values - zak_forward(f, QM).values)))
    F_fine = zak_forward(f, N * QM)
    embed_err = 0.0
    for theta_w in F_M.thetas[::max(1, F_M.thetas.shape[0] // 16)]:
        embed_err = max(embed_err, float(np.max(np.abs(zak_embed(F_fine, M, theta_w) - F_M.fiber(theta_w)))))
    fd = zak_forward_general(f, M, QM, points=fundamental_domain(M, P))
    return {'round_trip': round_trip, 'parseval': parseval, 'parseval_M': abs(fd.norm() - f.norm()),
            'refine_mean': mean_err, 'embed': embed_err}


def _kernel_checks(spec, tol):
    results = {}
    d = spec.dim
    x = np.full((1, d), 0.25)
    step = np.eye(d)[0]
    # K_t(x, y + n) = K_t(x - n, y)
    lhs = kernel_line(spec, 0.1, 2, 8, x, x + 0.5 + step, 4).values
    rhs = kernel_line(spec, 0.1, 2, 8, x - step, x + 0.5, 4).values
    gap = float(np.max(np.abs(lhs - rhs)))
    results['kernel_periodicity'] = (gap, gap <= 1e-2 * tol['kernel'])
    if spec.lower_order_vanishes():
        pts = np.stack(np.meshgrid(*([np.array([0.0, 0.5])] * d), indexing='ij'), axis=-1).reshape(-1, d)
        dev = scaling_check(spec, 2, 0.1, pts, W=1, Q=8, K=4)
        results['scaling_identity'] = (dev, dev <= tol['scaling'])
    return results


def _free_kernel_gap(t=0.5):
    free = OperatorSpec(1, [[constant(1.0)]], self_adjoint=True)
    y = np.arange(-3.0, 3.5, 0.5).reshape(-1, 1)
    kg = kernel_line(free, t, 3, 64, [[0.0]], y, K=4)
    exact = np.exp(-y[:, 0] ** 2 / (4.0 * t)) / np.sqrt(4.0 * np.pi * t)
    return float(np.max(np.abs(kg.values[0] - exact)))


def _invariant_suite(cfg, spec):
    tol = cfg.tolerances
    results = {}
    theta = np.full(spec.dim, 0.3)
    fm = assemble(spec, theta, cfg.K)
    if spec.self_adjoint:
        defect = fm.hermitian_defect()
        norm = max(1.0, float(np.max(np.abs(fm.entries))))
        results['fiber_hermitian'] = (defect, defect <= 1e-12 * norm)
        es = eig_hermitian(fm)
        residual = float(np.max(np.abs(fm.entries @ es.eigenvectors - es.eigenvectors * es.eigenvalues)))
        scale = max(1.0, float(np.max(np.abs(es.eigenvalues))))
        results['eigen_residual'] = (residual, residual <= 1e-9 * scale)

        bigger = eig_hermitian(assemble(spec, theta, cfg.K + 1)).eigenvalues[:es.eigenvalues.shape[0]]
        rise = float(np.max(bigger - es.eigenvalues, initial=0.0))
        results['galerkin_monotone'] = (rise, rise <= tol['eig'] * scale)
        shifted = eig_hermitian(assemble(shift_zeroth(spec, 1.5), theta, cfg.K)).eigenvalues
        drift = float(np.max(np.abs(shifted - es.eigenvalues - 1.5)))
        results['shift_invariance'] = (drift, drift <= tol['eig'] * scale)
        if all(_f.is_real_valued() for _f in spec.fields()):
            mirrored = eig_hermitian(assemble(spec, -theta, cfg.K)).eigenvalues
            gap = float(np.max(np.abs(mirrored - es.eigenvalues)))
            results['time_reversal'] = (gap, gap <= tol['eig'] * scale)
        gap = abs(float(np.sum(es.eigenvalues)) - float(np.trace(fm.entries).real))
        results['trace_consistency'] = (gap, gap <= 0.1 * tol['eig'] * norm * fm.size)

        s_half = heat_fiber(es, 0.5).matrix
        s_one = heat_fiber(es, 1.0)
        gap = float(np.max(np.abs(s_half @ s_half - s_one.matrix)))
        results['semigroup_law'] = (gap, gap <= 1e-2 * tol['eig'])
        # ||S_2t||_Tr <= ||S_t||_HS^2
        lhs = trace_norm(heat_fiber(es, 2.0).matrix)
        rhs = hs_norm(s_one.matrix) ** 2
        results['trace_hs_bound'] = (max(lhs - rhs, 0.0), lhs <= rhs * (1.0 + tol['eig']))

        h = homogenize(spec, cfg.K)
        hat_fm = assemble_homogenized(h, theta, cfg.K)
        try:
            check_trace_hs_inequalities(heat(fm, 1.0), heat(fm, 0.5), heat(hat_fm, 1.0), heat(hat_fm, 0.5))
            results['trace_inequalities'] = (0.0, True)
        except InvariantViolation:
            results['trace_inequalities'] = (1.0, False)
        try:
            rows = homog_convergence(spec, theta, 1.0, [1, 2], cfg.K)
            results['eigenvalue_bound'] = (min(_r.slack for _r in rows), True)
        except InvariantViolation:
            results['eigenvalue_bound'] = (-1.0, False)
        herm = float(np.max(np.abs(h.C_hat - h.C_hat.conj().T)))
        results['homogenized_hermitian'] = (herm, herm <= 1e-10)
        if spec.lower_order_vanishes():
            dev = refinement_check(spec, theta, 2, max(1, min(cfg.K, 8) // 2))
            results['refinement_exact'] = (dev, dev <= tol['refine'])
    results.update(_kernel_checks(spec, tol))
    gap = _free_kernel_gap()
    results['gaussian_free_kernel'] = (gap, gap <= tol['kernel'])
    zak = _zak_report(RunConfig(P=4, W=2, Q=8, N=2, formats=[]))
    worst = max(zak.values())
    results['zak_identities'] = (worst, worst <= tol['zak'])
    return results


def main(argv=None):
    try:
        fire.Fire(BlochZakCommands, command=argv)
    except BlochZakError as e:
        print("[blochzak] error: {}".format(e), file=sys.stderr)
        return 2 if is_validation_error(e) else 3
    except ValueError as e:
        print("[blochzak] error: {}".format(e), file=sys.stderr)
        return 2
    return 0


def console_main():
    sys.exit(main())


if __name__ == '__main__':
    console_main()
