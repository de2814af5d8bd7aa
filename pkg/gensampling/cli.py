# SPDX-License-Identifier: MIT

"""Command line: ``gs gen|weights|reconstruct|evaluate|bench``."""

import argparse
import json
import logging
import os
import sys

import numpy as np

from gensampling import bench, fileio
from gensampling.config import load_config
from gensampling.errors import GeneralizedSamplingError, ShapeError, UsageError
from gensampling.operator import freq2wave, is_uniform_pattern
from gensampling.patterns import gen_grid, gen_jitter, gen_spiral, truncated_cosine_transform
from gensampling.solver import SolveOptions, solve_least_squares
from gensampling.wavelet_eval import weval_1d, weval_2d
from gensampling.wavelet_fourier import SUPPORTED_FAMILIES
from gensampling.weights import density, voronoi_weights

logger = logging.getLogger(__name__)


def configure_logging(verbose=False):
    verbose = verbose or os.environ.get('VERBOSE_LOGGING', 'false').lower() == 'true'
    log_level = logging.DEBUG if verbose else logging.INFO
    logging.basicConfig(level=log_level, format='%(asctime)s - %(levelname)s - %(message)s')
    logging.getLogger().setLevel(log_level)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def parse_args(argv=None):
    parser = _Parser(prog='gs', description='Generalized sampling: reconstruct wavelet coefficients from Fourier samples')
    parser.add_argument('--verbose', action='store_true',
                        help='Log at DEBUG level (same as VERBOSE_LOGGING=true)')
    parser.add_argument('--config', type=str, default=None,
                        help='Path to a gs.json config file (default: $GS_CONFIG, then the bundled gs.json)')
    commands = parser.add_subparsers(dest='command', required=True, parser_class=_Parser)

    gen = commands.add_parser('gen', help='Generate a sampling pattern')
    gen.add_argument('pattern', choices=['grid', 'jitter', 'spiral'])
    gen.add_argument('--output', '-o', required=True, help='Frequency file to write')
    gen.add_argument('--count', '-M', type=int, default=128,
                     help='Points (per axis for 2D grid and jitter) (default: 128)')
    gen.add_argument('--epsilon', type=float, default=0.5, help='Grid spacing (default: 0.5)')
    gen.add_argument('--eta', type=float, default=None, help='Jitter amplitude (default: epsilon/4)')
    gen.add_argument('--dim', type=int, choices=[1, 2], default=1)
    gen.add_argument('--turns', type=float, default=bench.SPIRAL_TURNS)
    gen.add_argument('--points-per-turn', type=float, default=bench.SPIRAL_POINTS_PER_TURN)
    gen.add_argument('--radius', type=float, default=15.5, help='Spiral radius K (default: 15.5)')
    gen.add_argument('--seed', type=int, default=0)
    gen.add_argument('--format', choices=fileio.FORMATS, default=None,
                     help='csv or binary (default: from the file extension)')
    gen.add_argument('--truncated-cosine', type=str, default=None, metavar='PATH',
                     help='Also write samples of the truncated cosine transform (1D only)')

    weights = commands.add_parser('weights', help='Voronoi weights and density of a sampling set')
    weights.add_argument('frequencies')
    weights.add_argument('--bandwidth', '-K', type=float, required=True, help='Half-width K of the region')
    weights.add_argument('--center', type=float, nargs='+', default=None, help='Region center (default: origin)')
    weights.add_argument('--output', '-o', default=None, help='Weight file to write (CSV)')

    reconstruct = commands.add_parser('reconstruct', help='Solve for wavelet coefficients')
    reconstruct.add_argument('frequencies')
    reconstruct.add_argument('samples')
    reconstruct.add_argument('--output', '-o', required=True, help='Coefficient file to write')
    reconstruct.add_argument('--family', choices=SUPPORTED_FAMILIES, default=None)
    reconstruct.add_argument('--scale-J', '-J', type=int, required=True, dest='J')
    reconstruct.add_argument('--bandwidth', '-K', type=float, default=None)
    reconstruct.add_argument('--weighted', action=argparse.BooleanOptionalAction, default=None,
                             help='Weight rows by Voronoi areas (default: when a bandwidth is given and the pattern is nonuniform)')
    reconstruct.add_argument('--tol', type=float, default=None)
    reconstruct.add_argument('--max-iter', type=int, default=None)
    reconstruct.add_argument('--method', choices=['cgnr', 'crls'], default=None)
    reconstruct.add_argument('--alias', action='store_true',
                             help='Fold frequencies beyond the band instead of rejecting them')

    evaluate = commands.add_parser('evaluate', help='Evaluate a coefficient file on a dyadic grid')
    evaluate.add_argument('coefficients')
    evaluate.add_argument('--resolution', '-R', type=int, required=True)
    evaluate.add_argument('--output', '-o', required=True, help='CSV (1D) or PGM (2D) file to write')

    bench_parser = commands.add_parser('bench', help='Time a registry problem')
    bench_parser.add_argument('problem', choices=sorted(bench.REGISTRY))
    bench_parser.add_argument('--scale', type=float, default=1.0, help='Power-of-two size factor per axis')
    bench_parser.add_argument('--seed', type=int, default=0)
    bench_parser.add_argument('--repeats', type=int, default=None)
    bench_parser.add_argument('--warmup', type=int, default=None)
    bench_parser.add_argument('--report', type=str, default=None, help='CSV report to append to')
    bench_parser.add_argument('--tol', type=float, default=None)
    bench_parser.add_argument('--max-iter', type=int, default=None)

    return parser.parse_args(argv)


def _operator_options(context):
    return dict(
        sigma=context['nfft']['sigma'],
        w=context['nfft']['half_width'],
        kernel=context['nfft']['kernel'],
        terms=context['fourier']['terms'],
        depth=context['fourier']['depth'],
        densify_cap=context['densify_cap'],
    )


def cmd_gen(args, context):
    if args.pattern == 'grid':
        points = gen_grid(args.count, args.epsilon, args.dim)
    elif args.pattern == 'jitter':
        eta = args.epsilon / 4 if args.eta is None else args.eta
        points = gen_jitter(args.count, args.epsilon, eta, args.seed, args.dim)
    else:
        points = gen_spiral(args.turns, args.points_per_turn, args.radius)
    fileio.write_frequencies(args.output, points, args.format)
    if args.truncated_cosine:
        if points.ndim != 1:
            raise UsageError("--truncated-cosine needs a 1D pattern")
        fileio.write_samples(args.truncated_cosine, truncated_cosine_transform(points), args.format)
    return 0


def cmd_weights(args, context):
    points = fileio.read_frequencies(args.frequencies)
    weight_set = voronoi_weights(points, args.bandwidth, args.center)
    report = density(points, args.bandwidth, args.center, weight_set=weight_set)
    if args.output:
        fileio.write_weights(args.output, weight_set.mu)
    print(json.dumps(dict(report.as_dict(), total=weight_set.total, count=int(weight_set.mu.shape[0])), indent=2))
    return 0


def cmd_reconstruct(args, context):
    points = fileio.read_frequencies(args.frequencies)
    samples = fileio.read_samples(args.samples)
    if samples.shape[0] != points.shape[0]:
        raise ShapeError(f"{args.samples} holds {samples.shape[0]} samples but {args.frequencies} holds {points.shape[0]} frequencies")
    family = args.family or context['family']

    weighted = args.weighted
    if weighted is None:
        weighted = args.bandwidth is not None and not is_uniform_pattern(points)
    weights, report = None, None
    if weighted:
        if args.bandwidth is None:
            raise UsageError("--weighted needs --bandwidth")
        weight_set = voronoi_weights(points, args.bandwidth)
        weights = weight_set.mu
        report = density(points, args.bandwidth, weight_set=weight_set)
        if not report.satisfies_quarter_bound:
            logger.warning(f"Sampling density {report.delta_normalized:.3f} does not satisfy the 1/4 bound")

    op = freq2wave(points, family, args.J, bandwidth=args.bandwidth, weights=weights, alias=args.alias,
                   **_operator_options(context))
    solver = context['solver']
    max_iterations = solver['max_iterations_factor'] * op.shape[1] if args.max_iter is None else args.max_iter
    options = SolveOptions(
        max_iterations=max_iterations,
        tolerance=solver['tolerance'] if args.tol is None else args.tol,
        method=args.method or solver['method'],
    )
    coeffs, stats = solve_least_squares(op, samples, options)

    fileio.write_coefficients(args.output, coeffs, family, args.J)
    sidecar = dict(stats.as_dict(), family=family, J=args.J, M=int(op.M), weighted=bool(weighted),
                   density=report.as_dict() if report else None)
    fileio.write_stats(fileio.stats_path(args.output), sidecar)
    return 0


def cmd_evaluate(args, context):
    coeffs, family, J = fileio.read_coefficients(args.coefficients)
    if np.iscomplexobj(coeffs) and np.any(coeffs.imag != 0):
        logger.debug(f"Dropping imaginary parts up to {np.max(np.abs(coeffs.imag)):.3e} before evaluation")
    real = np.real(coeffs)
    evaluation = weval_1d(real, family, J, args.resolution) if real.ndim == 1 else weval_2d(real, family, J, args.resolution)
    fileio.write_evaluation(args.output, evaluation)
    return 0


def cmd_bench(args, context):
    settings = context['bench']
    problem = bench.get_problem(args.problem, args.scale)
    options = SolveOptions(
        max_iterations=(context['solver']['max_iterations_factor'] * problem.shape[1]
                        if args.max_iter is None else args.max_iter),
        tolerance=context['solver']['tolerance'] if args.tol is None else args.tol,
        method=context['solver']['method'],
    )
    record = bench.run_problem(
        problem,
        seed=args.seed,
        warmup=settings['warmup'] if args.warmup is None else args.warmup,
        repeats=settings['repeats'] if args.repeats is None else args.repeats,
        solve_options=options,
        operator_options=_operator_options(context),
    )
    bench.append_record(args.report or settings['report'], record)
    print(f"{record.problem},{record.shape},{record.init_seconds:.6f},{record.solve_seconds:.6f},"
          f"{record.iterations},{record.seconds_per_iteration:.6f}")
    return 0


COMMANDS = {
    'gen': cmd_gen,
    'weights': cmd_weights,
    'reconstruct': cmd_reconstruct,
    'evaluate': cmd_evaluate,
    'bench': cmd_bench,
}


def main(argv=None):
    try:
        args = parse_args(argv)
        configure_logging(args.verbose)
        context = load_config(args.config)
        return COMMANDS[args.command](args, context)
    except GeneralizedSamplingError as e:
        configure_logging()
        logger.error(str(e))
        return e.exit_code


if __name__ == '__main__':
    sys.exit(main())
