# SPDX-License-Identifier: MIT

"""Benchmark registry and timing harness.

Each registry entry rebuilds one of the reference reconstruction problems
(all with db4): operator construction, weights included, is timed as
``init`` and the least-squares solve as ``solve``. After ``warmup`` untimed
runs the median of ``repeats`` timed runs is reported.
"""

import csv
import logging
import math
import os
import statistics
import time
from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np

from gensampling.errors import UsageError
from gensampling.operator import freq2wave
from gensampling.patterns import gen_grid, gen_jitter, gen_spiral
from gensampling.solver import SolveOptions, solve_least_squares
from gensampling.weights import voronoi_weights

logger = logging.getLogger(__name__)

SPIRAL_TURNS = 27681 / 1025
SPIRAL_POINTS_PER_TURN = 1025


@dataclass(frozen=True)
class BenchProblem:
    name: str
    dim: int
    kind: str
    M: int
    J: int
    epsilon: Optional[float] = None
    K: Optional[float] = None
    weighted: bool = False
    family: str = 'db4'

    @property
    def N(self):
        return 2 ** self.J

    @property
    def shape(self):
        return (self.sample_count, self.N ** self.dim)

    @property
    def sample_count(self):
        if self.kind == 'spiral':
            return self.M
        return self.M ** self.dim

    def scaled(self, scale):
        """Same problem with M and N multiplied by ``scale`` per axis."""
        if scale <= 0 or math.log2(scale) != round(math.log2(scale)):
            raise UsageError(f"--scale must be a power of two, got {scale}")
        exponent = math.log2(scale)
        if scale == 1:
            return self
        K = None if self.K is None else self.K * scale
        # spiral M counts all points, grid M counts points per axis
        M = self.M * scale ** (self.dim if self.kind == 'spiral' else 1)
        return BenchProblem(
            name=self.name, dim=self.dim, kind=self.kind, M=max(1, int(round(M))),
            J=self.J + int(round(exponent)), epsilon=self.epsilon, K=K, weighted=self.weighted, family=self.family,
        )

    def points(self, seed):
        if self.kind == 'grid':
            return gen_grid(self.M, self.epsilon, self.dim)
        if self.kind == 'jitter':
            return gen_jitter(self.M, self.epsilon, self.epsilon / 4, seed, self.dim)
        # spiral radius stays inside the band |xi| < N/2
        fraction = self.M / 27681
        turns = SPIRAL_TURNS * math.sqrt(fraction)
        per_turn = SPIRAL_POINTS_PER_TURN * math.sqrt(fraction)
        return gen_spiral(max(turns, 1.0), per_turn, 0.97 * self.K)


REGISTRY = {
    'uniform1d': BenchProblem(name='uniform1d', dim=1, kind='grid', M=8192, J=12, epsilon=0.5),
    'jitter1d': BenchProblem(name='jitter1d', dim=1, kind='jitter', M=5463, J=11, epsilon=0.36, K=1024, weighted=True),
    'uniform2d': BenchProblem(name='uniform2d', dim=2, kind='grid', M=512, J=8, epsilon=0.5),
    'jitter2d': BenchProblem(name='jitter2d', dim=2, kind='jitter', M=162, J=5, epsilon=0.19, K=16, weighted=True),
    'spiral': BenchProblem(name='spiral', dim=2, kind='spiral', M=27681, J=5, K=16, weighted=True),
}


@dataclass
class BenchRecord:
    problem: str
    M: int
    N: int
    init_seconds: float
    solve_seconds: float
    iterations: int
    seconds_per_iteration: float
    converged: bool

    @property
    def shape(self):
        return f"{self.M}x{self.N}"


def get_problem(name, scale=1.0):
    if name not in REGISTRY:
        raise UsageError(f"Unknown benchmark problem '{name}', expected one of {', '.join(REGISTRY)}")
    return REGISTRY[name].scaled(scale)


def build_operator(problem, points, operator_options=None):
    weights = None
    if problem.weighted:
        weights = voronoi_weights(points, problem.K).mu
    return freq2wave(points, problem.family, problem.J, weights=weights, **(operator_options or {}))


def run_problem(problem, seed=0, warmup=1, repeats=5, solve_options=None, operator_options=None):
    """Time ``problem`` and return a BenchRecord with median timings."""
    if repeats < 1:
        raise UsageError(f"repeats must be at least 1, got {repeats}")
    points = problem.points(seed)
    rng = np.random.default_rng(seed)
    truth_shape = (problem.N,) * problem.dim
    truth = rng.standard_normal(truth_shape) + 1j * rng.standard_normal(truth_shape)

    op = build_operator(problem, points, operator_options)
    samples = op.forward(truth)
    if op.weights is not None:
        samples = samples / np.sqrt(op.weights)

    init_times, solve_times, iterations, converged = [], [], [], []
    for run in range(warmup + repeats):
        start = time.perf_counter()
        op = build_operator(problem, points, operator_options)
        built = time.perf_counter()
        _, stats = solve_least_squares(op, samples, solve_options or SolveOptions())
        finished = time.perf_counter()
        if run < warmup:
            continue
        init_times.append(built - start)
        solve_times.append(finished - built)
        iterations.append(stats.iterations)
        converged.append(stats.converged)

    solve_seconds = statistics.median(solve_times)
    record = BenchRecord(
        problem=problem.name,
        M=op.shape[0],
        N=op.shape[1],
        init_seconds=statistics.median(init_times),
        solve_seconds=solve_seconds,
        iterations=iterations[-1],
        seconds_per_iteration=solve_seconds / max(iterations[-1], 1),
        converged=all(converged),
    )
    logger.info(f"{record.problem} {record.shape}: init {record.init_seconds:.3f}s, "
                f"solve {record.solve_seconds:.3f}s in {record.iterations} iterations")
    return record


def append_record(path, record):
    """Append one CSV row, writing the header when the file is new."""
    row = asdict(record)
    row['shape'] = record.shape
    new_file = not os.path.exists(path) or os.path.getsize(path) == 0
    with open(path, 'a', newline='') as handle:
        writer = csv.DictWriter(handle, fieldnames=list(row))
        if new_file:
            writer.writeheader()
        writer.writerow(row)
    logger.info(f"Appended {record.problem} record to {path}")
