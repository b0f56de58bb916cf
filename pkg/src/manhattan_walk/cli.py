"""
Command-line front end.

Usage:
    manhattan-walk formula  --d 2 --n-max 5
    manhattan-walk exact    --d 3 --n-max 20 --format json
    manhattan-walk simulate --d 3 --n 100 --chains 100000 --seed 1 --stride 10
    manhattan-walk census   --d 5
    manhattan-walk coupling --n-max 10
    manhattan-walk compare  --d 3 --n-max 12 --chains 100000
    manhattan-walk report   --d 3 --n-max 40 --chains 20000 --out msd.svg

Every flag can also be set through an environment variable named
``MWALK_<FLAG>`` (e.g. ``MWALK_D=3``, ``MWALK_N_MAX=10``); flags win.

Exit codes: 0 all checks passed, 1 a verification failed, 2 usage error,
3 resource budget exceeded.
"""

from __future__ import annotations

import functools
import sys

import click

from . import exact, formulas, lattice, walk
from .report import Series, Table, moments_table, svg_plot

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3
ENV_PREFIX = "MWALK_"
Z_LIMIT = 5.0


def _opt(*decls, **kw):
    name = decls[0].lstrip("-").split("/")[0].replace("-", "_").upper()
    kw.setdefault("envvar", ENV_PREFIX + name)
    kw.setdefault("show_envvar", True)
    return click.option(*decls, **kw)


def _validate_d(ctx, param, value):
    if value < 2:
        raise click.BadParameter("the lattice needs d >= 2")
    return value


d_option = _opt("--d", "d", type=int, default=2, show_default=True, callback=_validate_d,
                help="Lattice dimension.")
n_max_option = _opt("--n-max", type=click.IntRange(min=0), default=10, show_default=True,
                    help="Largest step count.")
chains_option = _opt("--chains", type=click.IntRange(min=0), default=10_000, show_default=True,
                     help="Number of Monte Carlo chains.")
seed_option = _opt("--seed", type=int, default=1, show_default=True, help="Master seed.")
rule_option = _opt("--rule", default="manhattan", show_default=True,
                   help="Orientation rule: manhattan or iid:<seed>.")
out_option = _opt("--out", type=click.Path(dir_okay=False, writable=True), default=None,
                  help="Output file (default stdout).")
workers_option = _opt("--workers", type=click.IntRange(min=1), default=1, show_default=True,
                      help="Worker threads for Monte Carlo.")
max_sites_option = _opt("--max-sites", type=click.IntRange(min=1),
                        default=exact.DEFAULT_MAX_SITES, show_default=True,
                        help="Live-site budget of the exact engine.")


def format_option(choices, default):
    return _opt("--format", "fmt", type=click.Choice(choices), default=default,
                show_default=True, help="Output format.")


def _emit(text: str, out: str | None) -> None:
    if out is None:
        click.echo(text, nl=False)
    else:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _render(table: Table, fmt: str, out: str | None, plot=None) -> None:
    if fmt == "csv":
        _emit(table.to_csv(), out)
    elif fmt == "json":
        _emit(table.to_json(), out)
    else:
        _emit(plot(), out)


def _parse_rule(text: str, d: int) -> lattice.OrientationRule:
    try:
        return lattice.parse_rule(text, d)
    except ValueError as e:
        raise click.BadParameter(str(e), param_hint="--rule") from None


def _verdict(ok: bool) -> str:
    return "PASS" if ok else "FAIL"


def budget_guard(func):
    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except exact.BudgetExceeded as e:
            click.echo(f"resource budget exceeded: {e}", err=True)
            sys.exit(EXIT_BUDGET)
        except walk.InvariantViolation as e:
            click.echo(f"invariant violation: {e}", err=True)
            sys.exit(EXIT_FAIL)

    return wrapper


@click.group()
def cli():
    """Exact and Monte Carlo moments of the random walk on the Manhattan lattice."""


@cli.command()
@d_option
@n_max_option
@format_option(["csv", "json", "svg"], "csv")
@out_option
def formula(d, n_max, fmt, out):
    """Closed-form mean coefficient and mean square displacement for n = 0..n-max."""
    t = Table("formula", ["n", "mean_coefficient", "mean_float", "msd", "msd_float",
                          "numerator_divisible", "recurrence_residual"],
              meta={"d": d, "n_max": n_max})
    series = formulas.msd_series(d, n_max + 2)
    ok = True
    for n in range(n_max + 1):
        c = formulas.mean_coefficient(d, n)
        v = series[n]
        _, divisible = formulas.numerator_divisibility(d, n)
        resid = formulas.recurrence_residual(d, series, n)
        ok &= divisible and resid == 2
        t.rows.append([n, c, float(c), v, float(v), divisible, resid])

    def plot():
        ns = list(range(n_max + 1))
        lim = float(formulas.diffusive_limit(d))
        return svg_plot(
            [Series("formula E|X_n|^2", ns, [float(series[n]) for n in ns]),
             Series(f"asymptote n*{d}/{d - 1}", ns, [n * lim for n in ns], "dashed")],
            f"Mean square displacement, d={d}", "n", "E|X_n|^2")

    _render(t, fmt, out, plot)
    sys.exit(EXIT_OK if ok else EXIT_FAIL)


@cli.command("exact")
@d_option
@n_max_option
@rule_option
@max_sites_option
@format_option(["csv", "json", "svg"], "csv")
@out_option
@budget_guard
def exact_cmd(d, n_max, rule, max_sites, fmt, out):
    """Exact moments and return probabilities by sparse dynamic programming."""
    r = _parse_rule(rule, d)
    check = isinstance(r, lattice.Manhattan)
    cols = (["n", "sites", "total"] + [f"mean_{i + 1}" for i in range(d)]
            + ["msd", "msd_float", "return_probability"])
    if check:
        cols += ["formula_msd", "verdict"]
    t = Table("exact", cols, meta={"d": d, "n_max": n_max, "rule": r.describe()})
    ok = True
    msds = []
    for dist in exact.iter_distributions(d, n_max, r, max_sites):
        mean = exact.exact_mean(dist)
        v = exact.exact_msd(dist)
        msds.append(float(v))
        ret = dist.probability((0,) * d) if dist.n % 2 == 0 else None
        row = [dist.n, len(dist.counts), dist.total, *mean, v, float(v), ret]
        if check:
            c = formulas.mean_coefficient(d, dist.n)
            good = (v == formulas.msd(d, dist.n) and all(m == c for m in mean)
                    and dist.total == d**dist.n)
            ok &= good
            row += [formulas.msd(d, dist.n), _verdict(good)]
        t.rows.append(row)

    def plot():
        ns = list(range(n_max + 1))
        return svg_plot([Series("exact E|X_n|^2", ns, msds, "points")],
                        f"Exact mean square displacement, d={d}, {r.describe()}",
                        "n", "E|X_n|^2")

    _render(t, fmt, out, plot)
    sys.exit(EXIT_OK if ok else EXIT_FAIL)


@cli.command()
@d_option
@_opt("--n", "n_steps", type=click.IntRange(min=1), default=100, show_default=True,
      help="Steps per chain.")
@chains_option
@seed_option
@rule_option
@_opt("--stride", type=click.IntRange(min=1), default=1, show_default=True,
      help="Record moments every STRIDE steps.")
@_opt("--check-invariants/--no-check-invariants", default=None,
      help="Verify pathwise identities at every step (default: on for <= 10^4 chains).")
@workers_option
@format_option(["csv", "json", "svg"], "csv")
@out_option
@budget_guard
def simulate(d, n_steps, chains, seed, rule, stride, check_invariants, workers, fmt, out):
    """Monte Carlo estimates of the mean and mean square displacement."""
    if chains < 1:
        raise click.BadParameter("simulate needs at least one chain", param_hint="--chains")
    r = _parse_rule(rule, d)
    cfg = walk.SimConfig(d, r, n_steps, chains, seed, stride, check_invariants, workers)
    sm = walk.simulate(cfg)
    t = moments_table(sm)

    def plot():
        ns = [rec.n for rec in sm.records]
        return svg_plot(
            [Series("Monte Carlo", ns, [float(rec.msd()) for rec in sm.records], "errorbars",
                    [rec.msd_stderr() for rec in sm.records])],
            f"Simulated mean square displacement, d={d}, {chains} chains",
            "n", "E|X_n|^2")

    _render(t, fmt, out, plot)
    sys.exit(EXIT_OK)


@cli.command()
@d_option
@_opt("--radius", type=click.IntRange(min=1), default=2, show_default=True,
      help="Half-width of the census box.")
@rule_option
@format_option(["csv", "json"], "csv")
@out_option
def census(d, radius, rule, fmt, out):
    """Distinct local environments over a box around the origin."""
    r = _parse_rule(rule, d)
    envs = sorted(lattice.env_census(r, radius))
    expected = lattice.expected_census_count(d) if isinstance(r, lattice.Manhattan) else None
    ok = expected is None or len(envs) == expected
    verdict = "N/A" if expected is None else _verdict(ok)
    t = Table("census", ["environment"],
              meta={"d": d, "radius": radius, "rule": r.describe(), "count": len(envs),
                    "expected": expected, "verdict": verdict,
                    "environments": lattice.census_to_json(envs)})
    t.rows = [[" ".join(f"{s:+d}" for s in e)] for e in envs]
    _render(t, fmt, out)
    click.echo(f"{len(envs)} environments, expected {expected}: {verdict}", err=True)
    sys.exit(EXIT_OK if ok else EXIT_FAIL)


@cli.command()
@_opt("--d", "d", type=int, default=2, show_default=True, help="Must be 2.")
@n_max_option
@format_option(["csv", "json"], "csv")
@out_option
def coupling(d, n_max, fmt, out):
    """Check that floor(X_2n / 2) has the law of the 2D simple random walk."""
    if d != 2:
        raise click.BadParameter(
            f"the floor-halving coupling only exists for d=2; {d}^(2n) Manhattan paths "
            f"cannot be matched with (2*{d})^n simple-walk paths", param_hint="--d")
    t = Table("coupling", ["n", "paths", "verdict"], meta={"d": 2, "n_max": n_max})
    ok = True
    for n in range(n_max + 1):
        good = exact.srw_coupling_check(n)
        ok &= good
        t.rows.append([n, 4**n, _verdict(good)])
    _render(t, fmt, out)
    sys.exit(EXIT_OK if ok else EXIT_FAIL)


def _compare_rows(d, n_max, chains, seed, workers, max_sites):
    oracle = {dist.n: dist for dist in exact.iter_distributions(d, n_max, None, max_sites)}
    sm = None
    if chains > 0:
        cfg = walk.SimConfig(d, lattice.Manhattan(d), max(n_max, 1), chains, seed, 1,
                             None, workers)
        sm = walk.simulate(cfg)
    rows = []
    for n in range(n_max + 1):
        f_msd = formulas.msd(d, n)
        f_mean = formulas.mean_coefficient(d, n)
        o_msd = exact.exact_msd(oracle[n])
        o_mean = exact.exact_mean(oracle[n])
        exact_ok = o_msd == f_msd and all(m == f_mean for m in o_mean)
        row = {"n": n, "formula_msd": f_msd, "oracle_msd": o_msd, "formula_mean": f_mean,
               "exact_ok": exact_ok, "mc_msd": None, "mc_stderr": None, "z": None,
               "mc_ok": None}
        if sm is not None:
            rec = sm.at(n)
            z = walk.z_score(rec.msd(), f_msd, rec.msd_stderr())
            row.update(mc_msd=float(rec.msd()), mc_stderr=rec.msd_stderr(), z=z,
                       mc_ok=abs(z) <= Z_LIMIT)
        rows.append(row)
    return rows


@cli.command()
@d_option
@n_max_option
@chains_option
@seed_option
@workers_option
@max_sites_option
@format_option(["csv", "json", "svg"], "csv")
@out_option
@budget_guard
def compare(d, n_max, chains, seed, workers, max_sites, fmt, out):
    """Formula vs exact oracle vs Monte Carlo, one row per n (--chains 0 skips Monte Carlo)."""
    rows = _compare_rows(d, n_max, chains, seed, workers, max_sites)
    cols = ["n", "formula_msd", "formula_msd_float", "oracle_msd", "formula_mean",
            "exact_verdict", "mc_msd", "mc_stderr", "z", "mc_verdict"]
    t = Table("compare", cols, meta={"d": d, "n_max": n_max, "chains": chains, "seed": seed})
    for r in rows:
        mc_verdict = "SKIP" if r["mc_ok"] is None else _verdict(r["mc_ok"])
        t.rows.append([r["n"], r["formula_msd"], float(r["formula_msd"]), r["oracle_msd"],
                       r["formula_mean"], _verdict(r["exact_ok"]), r["mc_msd"],
                       r["mc_stderr"], r["z"], mc_verdict])

    def plot():
        return _msd_figure(d, rows)

    _render(t, fmt, out, plot)
    sys.exit(EXIT_OK if all(r["exact_ok"] for r in rows) else EXIT_FAIL)


def _msd_figure(d, rows):
    ns = [r["n"] for r in rows]
    lim = float(formulas.diffusive_limit(d))
    series = [
        Series("formula", ns, [float(r["formula_msd"]) for r in rows]),
        Series(f"asymptote n*{d}/{d - 1}", ns, [n * lim for n in ns], "dashed"),
    ]
    orc = [r for r in rows if r["oracle_msd"] is not None]
    if orc:
        series.append(Series("exact oracle", [r["n"] for r in orc],
                             [float(r["oracle_msd"]) for r in orc], "points"))
    mc = [r for r in rows if r["mc_msd"] is not None]
    if mc:
        series.append(Series("Monte Carlo +/- 1 s.e.", [r["n"] for r in mc],
                             [r["mc_msd"] for r in mc], "errorbars",
                             [r["mc_stderr"] for r in mc]))
    return svg_plot(series, f"Manhattan lattice d={d}: mean square displacement",
                    "n", "E|X_n|^2")


@cli.command()
@d_option
@n_max_option
@chains_option
@seed_option
@workers_option
@max_sites_option
@format_option(["svg", "csv", "json"], "svg")
@out_option
@budget_guard
def report(d, n_max, chains, seed, workers, max_sites, fmt, out):
    """Plot of MSD against n: formula, exact oracle points, Monte Carlo error bars.

    Oracle points stop at the largest n that fits the live-site budget.
    """
    n_oracle = n_max
    while n_oracle > 0 and exact.estimate_sites(d, n_oracle) > max_sites:
        n_oracle -= 1
    oracle = {dist.n: dist for dist in exact.iter_distributions(d, n_oracle, None, max_sites)}
    sm = None
    if chains > 0:
        sm = walk.simulate(walk.SimConfig(d, lattice.Manhattan(d), max(n_max, 1), chains,
                                          seed, 1, None, workers))
    rows = []
    ok = True
    for n in range(n_max + 1):
        f = formulas.msd(d, n)
        o = exact.exact_msd(oracle[n]) if n in oracle else None
        ok &= o is None or o == f
        row = {"n": n, "formula_msd": f, "oracle_msd": o, "mc_msd": None, "mc_stderr": None}
        if sm is not None:
            rec = sm.at(n)
            row.update(mc_msd=float(rec.msd()), mc_stderr=rec.msd_stderr())
        rows.append(row)
    t = Table("report", ["n", "formula_msd", "oracle_msd", "mc_msd", "mc_stderr"],
              meta={"d": d, "n_max": n_max, "chains": chains, "seed": seed,
                    "oracle_n_max": n_oracle})
    t.rows = [[r["n"], r["formula_msd"], r["oracle_msd"], r["mc_msd"], r["mc_stderr"]]
              for r in rows]
    _render(t, fmt, out, lambda: _msd_figure(d, rows))
    sys.exit(EXIT_OK if ok else EXIT_FAIL)


def main(argv=None):
    cli.main(args=argv, prog_name="manhattan-walk")


if __name__ == "__main__":
    main()
