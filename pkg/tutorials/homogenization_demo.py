import argparse
import numpy
from blochzak import (get_preset, list_presets, homogenize, band_sweep, band_report, homog_convergence,
                      refinement_limit)


def show_bands(spec, G, K):
    report = band_report(band_sweep(spec, G=G, K=K, n_max=5))
    for (lo, hi), (n, gap) in zip(report.intervals, report.gaps):
        print("band {}: [{:.6f}, {:.6f}]  gap to next {:.6f}".format(n, lo, hi, gap))


def show_homogenized(spec, K):
    h = homogenize(spec, K)
    print("C_hat =\n{}".format(numpy.array2string(h.C_hat.real, precision=12)))
    return h


def show_heat(spec, K, m_list):
    theta = numpy.zeros(spec.dim)
    print("   m  trace distance  eigenvalue sum")
    for row in homog_convergence(spec, theta, 1.0, m_list, K):
        print("{:4d}  {:14.6e}  {:14.6e}".format(row.m, row.trace_distance, row.eigen_sum))


def show_refinement(spec, N_list):
    theta = numpy.zeros(spec.dim)
    for row in refinement_limit(spec, theta, N_list, n_show=6):
        print("N={:<3d} max |N^2 lambda - homogenized| = {:.6e}".format(row.N, row.deviation))


if __name__ == "__main__":
    parser = argparse.ArgumentParser()
    parser.add_argument("--preset", '-p', default='cos-1d', choices=list_presets(),
                        help="The periodic operator to study")
    parser.add_argument("--K", type=int, default=16, help="Plane-wave cutoff")
    args = parser.parse_args()

    operator = get_preset(args.preset)
    print("== bands")
    show_bands(operator, G=32, K=min(args.K, 8))
    if operator.pure_second_order:
        print("== homogenized coefficients")
        show_homogenized(operator, args.K)
        print("== heat semigroup at t = 1, theta = 0")
        show_heat(operator, args.K, [2, 4, 8])
        print("== spectral refinement")
        show_refinement(operator, [4, 8, 16])
