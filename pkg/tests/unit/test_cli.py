# SPDX-License-Identifier: MIT

import csv
import json

import numpy as np
import pytest
from numpy.testing import assert_allclose

from gensampling import fileio
from gensampling.cli import main, parse_args
from gensampling.errors import UsageError
from gensampling.operator import apply_forward, freq2wave
from gensampling.patterns import gen_jitter, truncated_cosine
from gensampling.wavelet_eval import weval_1d


def _run(*argv):
    return main([str(arg) for arg in argv])


def _reconstruct_cosine(tmp_path, family, J):
    freq, samples = tmp_path / 'grid.csv', tmp_path / 'cosine.csv'
    if not freq.exists():
        assert _run('gen', 'grid', '-o', freq, '-M', 128, '--epsilon', 0.5, '--truncated-cosine', samples) == 0
    coeffs = tmp_path / f'{family}_{J}.gscf'
    evaluation = tmp_path / f'{family}_{J}.csv'
    assert _run('reconstruct', freq, samples, '-o', coeffs, '--family', family, '-J', J, '--alias') == 0
    assert _run('evaluate', coeffs, '-R', 10, '-o', evaluation) == 0
    x, values = fileio.read_evaluation_csv(str(evaluation))
    return x, values, fileio.read_stats(fileio.stats_path(str(coeffs)))


def test_parse_args_defaults():
    args = parse_args(['reconstruct', 'f.csv', 's.csv', '-o', 'c.gscf', '-J', '5'])
    assert args.command == 'reconstruct'
    assert args.J == 5
    assert args.weighted is None
    assert args.family is None
    args = parse_args(['reconstruct', 'f.csv', 's.csv', '-o', 'c.gscf', '--scale-J', '4', '--no-weighted'])
    assert args.weighted is False


def test_usage_errors():
    with pytest.raises(UsageError):
        parse_args(['transform'])
    assert _run('gen', 'radial', '-o', 'x.csv') == 2
    assert _run('reconstruct', 'f.csv') == 2
    assert _run('bench', 'uniform1d', '--scale', 3) == 2


def test_truncated_cosine_haar_error_decreases_with_scale(tmp_path):
    errors = []
    for J in (4, 5, 6):
        x, values, stats = _reconstruct_cosine(tmp_path, 'haar', J)
        assert stats['J'] == J
        assert stats['family'] == 'haar'
        assert stats['M'] == 128
        assert stats['weighted'] is False
        errors.append(np.sqrt(np.mean((values - truncated_cosine(x)) ** 2)))
    assert errors[0] > errors[1] > errors[2]


def test_smooth_family_rings_at_the_jump(tmp_path):
    x, haar, _ = _reconstruct_cosine(tmp_path, 'haar', 6)
    _, db4, _ = _reconstruct_cosine(tmp_path, 'db4', 6)
    window = np.abs(x) <= 2 ** -4
    f = truncated_cosine(x)
    assert np.max(np.abs(db4 - f)[window]) > np.max(np.abs(haar - f)[window])


def test_constant_haar_coefficients_evaluate_to_one(tmp_path):
    coeffs, evaluation = tmp_path / 'flat.gscf', tmp_path / 'flat.csv'
    fileio.write_coefficients(str(coeffs), np.full(16, 0.25 + 0j), 'haar', 4)
    assert _run('evaluate', coeffs, '--resolution', 8, '-o', evaluation) == 0
    x, values = fileio.read_evaluation_csv(str(evaluation))
    assert x.shape == (257,)
    assert_allclose(values[:-1], 1.0, atol=1e-14)


def test_rank_one_raster(tmp_path):
    rng = np.random.default_rng(3)
    a, b = rng.standard_normal(16), rng.standard_normal(16)
    coeffs, raster = tmp_path / 'rank1.gscf', tmp_path / 'rank1.pgm'
    fileio.write_coefficients(str(coeffs), np.outer(a, b), 'db2', 4)
    assert _run('evaluate', coeffs, '-R', 6, '-o', raster) == 0
    expected = np.outer(weval_1d(a, 'db2', 4, 6).values, weval_1d(b, 'db2', 4, 6).values)
    restored = fileio.read_pgm(str(raster))
    span = expected.max() - expected.min()
    assert np.max(np.abs(restored - expected)) <= span / 65535


def test_resolution_coarser_than_scale(tmp_path):
    coeffs = tmp_path / 'c.gscf'
    fileio.write_coefficients(str(coeffs), np.zeros(32), 'db2', 5)
    assert _run('evaluate', coeffs, '-R', 4, '-o', tmp_path / 'e.csv') == 5


def test_in_span_round_trip(tmp_path):
    rng = np.random.default_rng(17)
    points = gen_jitter(100, 0.3, 0.05, seed=2)
    truth = rng.standard_normal(32) + 1j * rng.standard_normal(32)
    freq, samples, coeffs = tmp_path / 'f.bin', tmp_path / 's.bin', tmp_path / 'c.gscf'
    fileio.write_frequencies(str(freq), points)
    fileio.write_samples(str(samples), apply_forward(freq2wave(points, 'db3', 5), truth))
    assert _run('reconstruct', freq, samples, '-o', coeffs, '--family', 'db3', '-J', 5, '--tol', 1e-12) == 0
    restored, family, J = fileio.read_coefficients(str(coeffs))
    assert (family, J) == ('db3', 5)
    assert np.linalg.norm(restored - truth) / np.linalg.norm(truth) < 1e-6


def test_weighted_mode_switches_on_for_nonuniform_sets(tmp_path):
    rng = np.random.default_rng(4)
    points = gen_jitter(100, 0.3, 0.05, seed=5)
    freq, samples, coeffs = tmp_path / 'f.csv', tmp_path / 's.csv', tmp_path / 'c.gscf'
    fileio.write_frequencies(str(freq), points)
    fileio.write_samples(str(samples), rng.standard_normal(100) + 0j)
    assert _run('reconstruct', freq, samples, '-o', coeffs, '-J', 5, '-K', 16) == 0
    stats = fileio.read_stats(fileio.stats_path(str(coeffs)))
    assert stats['weighted'] is True
    assert stats['family'] == 'db4'
    assert set(stats['density']) == {'delta_raw', 'delta_scaled', 'delta_normalized', 'satisfies_quarter_bound'}

    assert _run('reconstruct', freq, samples, '-o', coeffs, '-J', 5, '-K', 16, '--no-weighted') == 0
    assert fileio.read_stats(fileio.stats_path(str(coeffs)))['weighted'] is False
    assert _run('reconstruct', freq, samples, '-o', coeffs, '-J', 5, '--weighted') == 2


def test_mismatched_lengths(tmp_path):
    freq, samples = tmp_path / 'f.csv', tmp_path / 's.csv'
    fileio.write_frequencies(str(freq), np.array([0.0, 1.0, 2.0]))
    fileio.write_samples(str(samples), np.ones(2))
    assert _run('reconstruct', freq, samples, '-o', tmp_path / 'c.gscf', '-J', 3, '--family', 'haar') == 4


def test_unreadable_input(tmp_path):
    freq = tmp_path / 'f.csv'
    freq.write_text('not,a,table\n')
    assert _run('reconstruct', freq, freq, '-o', tmp_path / 'c.gscf', '-J', 3) == 3
    assert _run('weights', tmp_path / 'missing.csv', '-K', 1) == 3


def test_bandwidth_exceeded(tmp_path):
    freq, samples = tmp_path / 'f.csv', tmp_path / 's.csv'
    assert _run('gen', 'grid', '-o', freq, '-M', 128, '--epsilon', 0.5, '--truncated-cosine', samples) == 0
    assert _run('reconstruct', freq, samples, '-o', tmp_path / 'c.gscf', '-J', 4, '--family', 'haar') == 5


def test_weights_command(tmp_path, capsys):
    freq, weights = tmp_path / 'f.csv', tmp_path / 'w.csv'
    fileio.write_frequencies(str(freq), np.array([-0.25, 0.0, 0.25]))
    assert _run('weights', freq, '-K', 0.5, '-o', weights) == 0
    assert_allclose(fileio.read_weights(str(weights)), [0.375, 0.25, 0.375])
    report = json.loads(capsys.readouterr().out)
    assert report['count'] == 3
    assert report['total'] == pytest.approx(1.0)
    assert report['delta_raw'] == pytest.approx(0.25)
    assert report['delta_normalized'] == pytest.approx(0.25)
    assert report['satisfies_quarter_bound'] is False


def test_weights_of_uniform_grid_satisfy_bound(tmp_path, capsys):
    freq = tmp_path / 'f.csv'
    fileio.write_frequencies(str(freq), np.linspace(-8, 8, 65))
    assert _run('weights', freq, '-K', 8) == 0
    assert json.loads(capsys.readouterr().out)['satisfies_quarter_bound'] is True


def test_duplicate_points(tmp_path):
    freq = tmp_path / 'f.csv'
    fileio.write_frequencies(str(freq), np.array([0.0, 0.5, 0.5]))
    assert _run('weights', freq, '-K', 1) == 5


def test_gen_patterns(tmp_path):
    path = tmp_path / 'jitter.bin'
    assert _run('gen', 'jitter', '-o', path, '-M', 64, '--epsilon', 0.5, '--seed', 9, '--format', 'binary') == 0
    assert_allclose(fileio.read_frequencies(str(path)), gen_jitter(64, 0.5, 0.125, seed=9))

    path = tmp_path / 'grid2d.csv'
    assert _run('gen', 'grid', '-o', path, '-M', 8, '--dim', 2) == 0
    assert fileio.read_frequencies(str(path)).shape == (64, 2)

    path = tmp_path / 'spiral.csv'
    assert _run('gen', 'spiral', '-o', path, '--turns', 2, '--points-per-turn', 50, '--radius', 3) == 0
    points = fileio.read_frequencies(str(path))
    assert points.shape == (100, 2)
    assert np.max(np.hypot(points[:, 0], points[:, 1])) <= 3

    assert _run('gen', 'grid', '-o', tmp_path / 'g.csv', '--dim', 2, '--truncated-cosine', tmp_path / 's.csv') == 2


def test_bench_command(tmp_path, capsys):
    report = tmp_path / 'bench.csv'
    assert _run('bench', 'uniform1d', '--scale', 1 / 64, '--repeats', 1, '--warmup', 0, '--report', report) == 0
    line = capsys.readouterr().out.strip().split(',')
    assert line[0] == 'uniform1d'
    assert line[1] == '128x64'
    with open(report) as handle:
        rows = list(csv.DictReader(handle))
    assert rows[0]['problem'] == 'uniform1d'
    assert rows[0]['shape'] == '128x64'


def test_config_file_overrides_defaults(tmp_path):
    config = tmp_path / 'gs.json'
    config.write_text(json.dumps({"context": {"family": "db2", "solver": {"method": "crls"}}}))
    freq, samples, coeffs = tmp_path / 'f.csv', tmp_path / 's.csv', tmp_path / 'c.gscf'
    assert _run('gen', 'grid', '-o', freq, '-M', 32, '--epsilon', 0.5, '--truncated-cosine', samples) == 0
    assert _run('--config', config, 'reconstruct', freq, samples, '-o', coeffs, '-J', 4) == 0
    stats = fileio.read_stats(fileio.stats_path(str(coeffs)))
    assert stats['family'] == 'db2'
    assert stats['method'] == 'crls'

    config.write_text(json.dumps({"context": {"nfft": {"sigma": 0.5}}}))
    assert _run('--config', config, 'reconstruct', freq, samples, '-o', coeffs, '-J', 4) == 3


def test_explicit_zero_solver_settings_are_rejected(tmp_path):
    freq, samples, coeffs = tmp_path / 'f.csv', tmp_path / 's.csv', tmp_path / 'c.gscf'
    assert _run('gen', 'grid', '-o', freq, '-M', 32, '--epsilon', 0.5, '--truncated-cosine', samples) == 0
    assert _run('reconstruct', freq, samples, '-o', coeffs, '-J', 4, '--family', 'haar', '--tol', 0) == 5
    assert _run('reconstruct', freq, samples, '-o', coeffs, '-J', 4, '--family', 'haar', '--max-iter', 0) == 5
    assert _run('bench', 'uniform1d', '--scale', 1 / 64, '--repeats', 1, '--warmup', 0, '--tol', 0,
                '--report', tmp_path / 'bench.csv') == 5
