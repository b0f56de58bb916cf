"""Exit criteria of the package, one test per criterion.

Run with ``pytest tests/test_acceptance.py``; the terminal summary ends with
one PASS/FAIL line per criterion. All tolerances are exact except the
Monte Carlo z-score bound of 5.
"""

import time
from fractions import Fraction as F

import pytest
from click.testing import CliRunner

from manhattan_walk import exact, formulas, walk
from manhattan_walk.cli import cli
from manhattan_walk.lattice import Manhattan, env_census

acceptance = pytest.mark.acceptance

THEOREM_GRID = {2: 200, 3: 40, 4: 15, 5: 9, 6: 7}
Z_LIMIT = 5.0


@pytest.fixture(scope="module")
def exact_moments():
    """Exact (mean, msd, total) of X_n over the theorem grid, one DP sweep per d."""
    out = {}
    start = time.perf_counter()
    for d, n_max in THEOREM_GRID.items():
        for dist in exact.iter_distributions(d, n_max):
            out[d, dist.n] = (exact.exact_mean(dist), exact.exact_msd(dist), dist.total)
    out["elapsed"] = time.perf_counter() - start
    return out


@acceptance(1, "exact MSD equals the closed form on the (d, n) grid")
def test_theorem_msd(exact_moments):
    mismatches = [
        (d, n)
        for d, n_max in THEOREM_GRID.items()
        for n in range(n_max + 1)
        if exact_moments[d, n][1] != formulas.msd(d, n)
    ]
    assert mismatches == []
    assert all(exact_moments[d, n][2] == d**n for d, m in THEOREM_GRID.items() for n in range(m + 1))
    assert exact_moments["elapsed"] < 120


@acceptance(2, "exact mean equals the closed-form mean vector on the grid")
def test_theorem_mean(exact_moments):
    for d, n_max in THEOREM_GRID.items():
        for n in range(n_max + 1):
            mean = exact_moments[d, n][0]
            assert len(set(mean)) == 1, (d, n)
            assert mean == (formulas.mean_coefficient(d, n),) * d, (d, n)


@acceptance(3, "path enumeration equals dynamic programming for all d^n <= 10^6, d in 2..10")
def test_oracle_cross_check():
    start = time.perf_counter()
    checked = 0
    for d in range(2, 11):
        n_max = 0
        while d ** (n_max + 1) <= 10**6:
            n_max += 1
        for dist in exact.iter_distributions(d, n_max):
            assert exact.enumerate_paths(d, dist.n) == dist, (d, dist.n)
            checked += 1
    assert checked == 89  # 20+13+10+9+8+8+7+7+7 pairs (d, n)
    assert time.perf_counter() - start < 60


@acceptance(4, "recurrence residual is exactly 2 for d in 2..10, n in 0..100")
def test_recurrence():
    for d in range(2, 11):
        v = formulas.msd_series(d, 102)
        assert v[0] == 0 and v[1] == 1
        assert all(formulas.recurrence_residual(d, v, n) == 2 for n in range(101)), d


@acceptance(5, "d = 2 closed form 2n - 1 for n in 1..10^4")
def test_two_dimensional_closed_form():
    assert all(formulas.msd(2, n) == 2 * n - 1 for n in range(1, 10**4 + 1))


@acceptance(6, "literal numerator divisible by 2(d-1)^2 for d in 2..10, n in 0..50")
def test_divisibility():
    for d in range(2, 11):
        for n in range(51):
            q, ok = formulas.numerator_divisibility(d, n)
            assert ok, (d, n)
            assert F(q) / F(d) ** (n - 1) == formulas.msd(d, n)


@acceptance(7, "floor(X_2n / 2) has the simple-random-walk law for n in 0..10")
def test_coupling():
    start = time.perf_counter()
    assert all(exact.srw_coupling_check(n) for n in range(11))
    assert time.perf_counter() - start < 30


@acceptance(8, "environment census 4, 4, 16, 16, 64 for d = 2..6")
def test_census():
    assert [len(env_census(Manhattan(d))) for d in range(2, 7)] == [4, 4, 16, 16, 64]


MC_SEEDS = {2: 20240602, 3: 20240603, 4: 20240604}


@pytest.fixture(scope="module")
def monte_carlo():
    start = time.perf_counter()
    runs = {
        d: walk.simulate(walk.SimConfig(d, Manhattan(d), 100, 10**6, seed, record_stride=10))
        for d, seed in MC_SEEDS.items()
    }
    return runs, time.perf_counter() - start


@acceptance(9, "Monte Carlo MSD and mean within 5 standard errors (10^6 chains)")
def test_monte_carlo(monte_carlo):
    runs, elapsed = monte_carlo
    for d, sm in runs.items():
        for n in (10, 100):
            rec = sm.at(n)
            assert rec.n_chains == 10**6
            z = walk.z_score(rec.msd(), formulas.msd(d, n), rec.msd_stderr())
            assert abs(z) <= Z_LIMIT, (d, n, z)
            target = formulas.mean_coefficient(d, n)
            for m, se in zip(rec.mean(), rec.mean_stderr()):
                zm = walk.z_score(m, target, se)
                assert abs(zm) <= Z_LIMIT, (d, n, zm)
    assert elapsed < 120


@acceptance(10, "pathwise identities hold at every step of a 10^4-chain checked run")
def test_pathwise_identities():
    for d in (2, 3, 4, 5):
        cfg = walk.SimConfig(d, Manhattan(d), 200, 10**4, 1000 + d, record_stride=50,
                             check_invariants=True)
        assert cfg.invariants_enabled
        sm = walk.simulate(cfg)  # raises InvariantViolation on the first failure
        assert sm.at(200).n_chains == 10**4


@acceptance(11, "simulate and compare outputs byte-identical with 1 and 8 workers")
def test_determinism(tmp_path):
    runner = CliRunner()
    commands = {
        "simulate": ["simulate", "--d", "3", "--n", "100", "--chains", "100000",
                     "--seed", "42", "--stride", "10"],
        "compare": ["compare", "--d", "3", "--n-max", "20", "--chains", "100000",
                    "--seed", "42"],
    }
    for name, args in commands.items():
        for fmt in ("csv", "json"):
            blobs = []
            for rep, workers in enumerate((1, 8, 1, 8)):
                out = tmp_path / f"{name}_{fmt}_{rep}.out"
                res = runner.invoke(cli, args + ["--workers", str(workers), "--format", fmt,
                                                 "--out", str(out)])
                assert res.exit_code == 0, res.output
                blobs.append(out.read_bytes())
            assert len(set(blobs)) == 1, (name, fmt)


@acceptance(12, "|msd - n d/(d-1)| <= d/(d-1)^2 for d in 2..10, n in 0..1000")
def test_diffusive_deviation():
    for d in range(2, 11):
        lim = formulas.diffusive_limit(d)
        bound = F(d, (d - 1) ** 2)
        assert lim == F(d, d - 1)
        assert all(abs(formulas.msd(d, n) - n * lim) <= bound for n in range(1001)), d
