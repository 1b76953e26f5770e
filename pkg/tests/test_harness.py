import csv
import os

import numpy as np
import pytest

from sfpsolve.harness import (
    BenchConfig,
    RandomSpec,
    SparseSpec,
    gen_random_problem,
    gen_sparse_recovery,
    parse_bench_config,
    recovery_metrics,
    run_benchmark,
)
from sfpsolve.sets import FullSpace, NonnegativeOrthant, Singleton


def test_random_problem_deterministic():
    spec = RandomSpec(seed=123, m=6, n=9, trials=3)
    a = gen_random_problem(spec, 1)
    b = gen_random_problem(spec, 1)
    assert np.array_equal(a.problem.A, b.problem.A)
    assert np.array_equal(a.problem.Q.point, b.problem.Q.point)
    assert np.array_equal(a.x_true, b.x_true)


def test_random_problem_trials_differ():
    spec = RandomSpec(seed=123, m=6, n=9, trials=3)
    a = gen_random_problem(spec, 0)
    b = gen_random_problem(spec, 1)
    assert not np.array_equal(a.problem.A, b.problem.A)


def test_random_problem_is_consistent():
    spec = RandomSpec(seed=4, m=5, n=8, trials=1)
    inst = gen_random_problem(spec, 0)
    assert isinstance(inst.problem.C, NonnegativeOrthant)
    assert isinstance(inst.problem.Q, Singleton)
    assert np.all(inst.x_true >= 0)
    assert np.allclose(inst.problem.A @ inst.x_true, inst.problem.Q.point)
    assert np.array_equal(inst.x0, np.zeros(8))


def test_random_problem_trial_out_of_range():
    spec = RandomSpec(seed=0, m=2, n=2, trials=2)
    with pytest.raises(ValueError, match="out of range"):
        gen_random_problem(spec, 2)


def test_sparse_recovery_structure():
    spec = SparseSpec(seed=9, m=20, n=50, sparsity=5, noise_variance=1e-4, gamma=0.6)
    inst = gen_sparse_recovery(spec, 0)
    assert isinstance(inst.problem.C, FullSpace)
    assert np.count_nonzero(inst.x_true) == 5
    assert set(np.unique(np.abs(inst.x_true[inst.x_true != 0]))) == {1.0}
    assert inst.t_level == pytest.approx(5.0)
    assert inst.problem.gamma == 0.6


def test_sparse_recovery_zero_sparsity_noiseless():
    spec = SparseSpec(seed=9, m=4, n=6, sparsity=0, noise_variance=0.0, gamma=0.6)
    inst = gen_sparse_recovery(spec, 0)
    assert np.array_equal(inst.x_true, np.zeros(6))
    assert np.array_equal(inst.problem.Q.point, np.zeros(4))


def test_sparse_recovery_deterministic():
    spec = SparseSpec(seed=77, m=10, n=20, sparsity=3, noise_variance=1e-4, gamma=0.6)
    a = gen_sparse_recovery(spec, 2)
    b = gen_sparse_recovery(spec, 2)
    assert np.array_equal(a.problem.A, b.problem.A)
    assert np.array_equal(a.problem.Q.point, b.problem.Q.point)


def test_gaussian_moments():
    spec = RandomSpec(seed=1, m=100, n=120, trials=1)
    A = gen_random_problem(spec, 0).problem.A
    mn = A.size
    assert abs(A.mean()) <= 5.0 / np.sqrt(mn)
    assert abs(A.var() - 1.0) <= 0.1


def test_recovery_metrics_basic():
    x_true = np.array([1.0, 0.0, -1.0, 0.0])
    x_hat = np.array([0.999, 0.0, -1.001, 0.0])
    m = recovery_metrics(x_hat, x_true, iterations=10, wall_ms=1.0)
    assert m.rel_l2_error <= 2e-3
    assert m.support_precision == 1.0
    assert m.support_recall == 1.0


def test_recovery_metrics_support_counts():
    x_true = np.array([1.0, 0.0, 1.0, 0.0])
    x_hat = np.array([1.0, 0.5, 0.0, 0.0])  # one hit, one false positive, one miss
    m = recovery_metrics(x_hat, x_true, 0, 0.0)
    assert m.support_precision == pytest.approx(0.5)
    assert m.support_recall == pytest.approx(0.5)


def test_recovery_metrics_zero_truth():
    m = recovery_metrics(np.zeros(3), np.zeros(3), 0, 0.0)
    assert m.rel_l2_error == 0.0
    assert m.support_precision == 1.0 and m.support_recall == 1.0
    m2 = recovery_metrics(np.ones(3), np.zeros(3), 0, 0.0)
    assert np.isinf(m2.rel_l2_error)


def test_spec_validation():
    with pytest.raises(ValueError):
        RandomSpec(seed=0, m=0, n=3, trials=1)
    with pytest.raises(ValueError):
        SparseSpec(seed=0, m=3, n=3, sparsity=4, noise_variance=0.0, gamma=0.6)
    with pytest.raises(ValueError):
        SparseSpec(seed=0, m=3, n=3, sparsity=1, noise_variance=-1.0, gamma=0.6)
    with pytest.raises(ValueError):
        BenchConfig(kind="nope")
    with pytest.raises(ValueError):
        BenchConfig(kind="sparse", algos=("fb", "what"))


def test_parse_bench_config(tmp_path):
    cfg_file = tmp_path / "cfg.txt"
    cfg_file.write_text(
        "seed=5\nm=10\nn=20\nk=3\ntrials=2\ngamma=0.7\nnoise_variance=0\n"
        "algos=fb, cq\nout_dir=outx\ntraces=true\n# comment\n"
    )
    cfg = parse_bench_config(cfg_file, "sparse")
    assert cfg.seed == 5 and cfg.m == 10 and cfg.n == 20
    assert cfg.sparsity == 3 and cfg.gamma == 0.7
    assert cfg.algos == ("fb", "cq")
    assert cfg.out_dir == "outx"
    assert cfg.traces is True


def test_parse_bench_config_rejects_unknown_key(tmp_path):
    cfg_file = tmp_path / "cfg.txt"
    cfg_file.write_text("bogus=1\n")
    with pytest.raises(ValueError, match="unknown key"):
        parse_bench_config(cfg_file, "sparse")


def small_config(out_dir, traces=False):
    return BenchConfig(
        kind="sparse",
        seed=3,
        m=12,
        n=24,
        trials=2,
        gamma=0.6,
        sparsity=2,
        noise_variance=1e-4,
        algos=("cq", "fb"),
        out_dir=str(out_dir),
        max_iter=200,
        step_tol=1e-5,
        traces=traces,
    )


def test_run_benchmark_row_count_and_files(tmp_path):
    cfg = small_config(tmp_path / "out", traces=True)
    rows = run_benchmark(cfg)
    assert len(rows) == 2 * 2  # trials x algorithms
    assert [(r["trial"], r["algo"]) for r in rows] == sorted(
        (r["trial"], r["algo"]) for r in rows
    )
    assert os.path.exists(os.path.join(cfg.out_dir, "summary.csv"))
    for trial in range(2):
        for algo in ("cq", "fb"):
            assert os.path.exists(os.path.join(cfg.out_dir, f"trace_{algo}_{trial}.csv"))
    with open(os.path.join(cfg.out_dir, "summary.csv")) as fh:
        reader = csv.reader(fh)
        header = next(reader)
        assert header[:4] == ["trial", "algo", "status", "iterations"]
        assert len(list(reader)) == 4


def strip_timing(path):
    with open(path) as fh:
        rows = [line.rstrip("\n").split(",") for line in fh]
    # timing is always the last column in both summary and trace files
    return ["," .join(r[:-1]) for r in rows]


def test_benchmark_rerun_identical_modulo_timing(tmp_path):
    out1, out2 = tmp_path / "one", tmp_path / "two"
    run_benchmark(small_config(out1, traces=True))
    run_benchmark(small_config(out2, traces=True))
    names = sorted(os.listdir(out1))
    assert names == sorted(os.listdir(out2))
    for name in names:
        assert strip_timing(out1 / name) == strip_timing(out2 / name), name


def test_quantile_file_shape(tmp_path):
    cfg = small_config(tmp_path / "out")
    run_benchmark(cfg)
    with open(os.path.join(cfg.out_dir, "quantiles_fb.csv")) as fh:
        header = fh.readline().strip().split(",")
    assert header[0] == "iter"
    assert "residual_q50" in header and "objective_q50" in header


def test_quantile_median_matches_traces(tmp_path):
    # The q50 column is the median across trials of the per-trial traces
    # (shorter traces extended with their final value).
    cfg = small_config(tmp_path / "out", traces=True)
    run_benchmark(cfg)

    def read_col(path, col):
        with open(path) as fh:
            header = fh.readline().strip().split(",")
            idx = header.index(col)
            return [float(line.split(",")[idx]) for line in fh]

    traces = [
        read_col(os.path.join(cfg.out_dir, f"trace_fb_{t}.csv"), "residual")
        for t in range(cfg.trials)
    ]
    max_len = max(len(t) for t in traces)
    padded = np.array([t + [t[-1]] * (max_len - len(t)) for t in traces])
    med = read_col(os.path.join(cfg.out_dir, "quantiles_fb.csv"), "residual_q50")
    assert len(med) == max_len
    for j in range(max_len):
        assert med[j] == pytest.approx(float(np.median(padded[:, j])), rel=1e-9)
