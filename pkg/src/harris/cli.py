"""Command line interface: ``harris {pmf,cdf,sample,fit,experiment,stability}``.

Every command writes CSV with a header row (LF line endings) to standard
output or to ``--out``.  Exit codes: 2 bad input or parameters, 3 a fit
failed, 4 a stability check failed.
"""

from __future__ import annotations

import csv
import json
import sys
from contextlib import contextmanager

import click

from . import __version__
from .distribution import cdf, make_params, pmf_table, survival
from .errors import EstimationError, HarrisError
from .estimation import Method, Sample, fit
from .experiment import REPORT_FIELDS, TABLES, ExperimentSpec, published_table, run_experiment, table_specs
from .sampling import SAMPLERS, RngStream
from .stability import (
    gamma_harris_identity,
    id_check,
    limit_law_check,
    sd_check,
    stopped_sum_demo,
)

EXIT_USAGE = 2
EXIT_FIT = 3
EXIT_CHECK = 4

GRID_M = (1.25, 2.0, 10.0, 50.0)
GRID_K = (1, 2, 5)
SD_C = tuple(c / 10 for c in range(1, 10))
IDENTITY_T = (0.0, 0.5, 1.0, 2.0, 5.0)
IDENTITY_TOL = 1e-12

variant_option = click.option(
    "--variant", type=click.Choice(["h0", "h1"], case_sensitive=False), default="h1", show_default=True
)
out_option = click.option("--out", type=click.Path(dir_okay=False, writable=True), default=None,
                          help="Write CSV here instead of standard output.")


@contextmanager
def _csv_out(path):
    if path is None:
        stream = click.get_text_stream("stdout")
        yield csv.writer(stream, lineterminator="\n")
        stream.flush()
    else:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            yield csv.writer(fh, lineterminator="\n")


def _params(m, k, variant):
    try:
        return make_params(m, k, variant)
    except HarrisError as exc:
        raise click.UsageError(str(exc)) from None


@click.group()
@click.version_option(__version__, prog_name="harris")
def main():
    """Harris family of discrete distributions."""


@main.command("pmf")
@click.option("--m", type=float, required=True)
@click.option("--k", type=int, required=True)
@variant_option
@click.option("--rmax", type=click.IntRange(min=0), default=20, show_default=True)
@out_option
def cmd_pmf(m, k, variant, rmax, out):
    """Probability table x,p for lattice indices 0..RMAX."""
    params = _params(m, k, variant)
    with _csv_out(out) as w:
        w.writerow(["x", "p"])
        for point, prob in pmf_table(params, rmax):
            w.writerow([point.x, f"{prob:.6f}"])


@main.command("cdf")
@click.option("--m", type=float, required=True)
@click.option("--k", type=int, required=True)
@variant_option
@click.option("--rmax", type=click.IntRange(min=0), default=20, show_default=True)
@click.option("--x", "xs", type=float, multiple=True, help="Evaluate at these points instead of the lattice.")
@out_option
def cmd_cdf(m, k, variant, rmax, xs, out):
    """Distribution and survival functions."""
    params = _params(m, k, variant)
    points = xs or [params.support_point(r).x for r in range(rmax + 1)]
    with _csv_out(out) as w:
        w.writerow(["x", "cdf", "survival"])
        for x in points:
            label = f"{x:g}" if isinstance(x, float) else str(x)
            w.writerow([label, f"{cdf(params, x):.6f}", f"{survival(params, x):.6f}"])


@main.command("sample")
@click.option("--m", type=float, required=True)
@click.option("--k", type=int, required=True)
@variant_option
@click.option("--n", type=click.IntRange(min=0), required=True)
@click.option("--seed", type=click.IntRange(0, 2**64 - 1), default=0, show_default=True)
@click.option("--stream", type=click.IntRange(0, 2**64 - 1), default=0, show_default=True)
@click.option("--sampler", type=click.Choice(sorted(SAMPLERS)), default="gamma-poisson", show_default=True)
@out_option
def cmd_sample(m, k, variant, n, seed, stream, sampler, out):
    """Draw N variates, one per row."""
    params = _params(m, k, variant)
    x = SAMPLERS[sampler](params, RngStream(seed, stream), n)
    with _csv_out(out) as w:
        w.writerow(["x"])
        w.writerows([v] for v in x.tolist())


def _read_sample(source):
    try:
        text = source.read()
    except (OSError, UnicodeDecodeError) as exc:
        raise click.UsageError(f"cannot read input: {exc}") from None
    values = []
    for tok in text.split():
        try:
            v = int(tok)
        except ValueError:
            raise click.UsageError(f"not an integer: {tok!r}") from None
        if v < 0:
            raise click.UsageError(f"negative value: {v}")
        values.append(v)
    if not values:
        raise click.UsageError("input holds no values")
    return values


@main.command("fit")
@click.argument("source", type=click.File("r"), default="-")
@click.option("--method", type=click.Choice([m.value for m in Method]), default="mle", show_default=True)
@click.option("--origin", type=click.Choice(["0", "1"]), default="1", show_default=True)
@click.option("--json", "as_json", is_flag=True, help="Also print the full fit as JSON.")
def cmd_fit(source, method, origin, as_json):
    """Estimate (m, k) from whitespace-separated integers in SOURCE (default stdin)."""
    values = _read_sample(source)
    try:
        sample = Sample.of(values, int(origin))
        result = fit(sample, method)
    except EstimationError as exc:
        click.echo(f"{exc.name}: {exc}", err=True)
        sys.exit(EXIT_FIT)
    except HarrisError as exc:
        raise click.UsageError(str(exc)) from None
    lattice = "NA" if result.lattice is None else str(result.lattice)
    line = (
        f"method={result.method.value} n={sample.n} m_hat={result.m_hat:.5f} "
        f"k_hat={result.k_hat:.5f} k_hat_int={result.k_hat_int} lattice={lattice}"
    )
    if result.solver is not None:
        s = result.solver
        line += (
            f" iterations={s.iterations} bracket=[{s.bracket[0]:.6g},{s.bracket[1]:.6g}]"
            f" residual={s.residual:.3e}"
        )
    click.echo(line)
    if as_json:
        click.echo(json.dumps(result.as_dict(), sort_keys=True))


@main.command("experiment")
@click.option("--m", "ms", type=float, multiple=True, help="Repeatable; one cell per (m, k, n).")
@click.option("--k", "ks", type=int, multiple=True)
@click.option("--n", "ns", type=int, multiple=True)
@variant_option
@click.option("--reps", type=int, default=None, help="Repetitions per cell [default: 50].")
@click.option("--method", type=click.Choice([m.value for m in Method]), default="mle", show_default=True)
@click.option("--seed", type=click.IntRange(0, 2**64 - 1), default=0, show_default=True)
@click.option("--threads", type=click.IntRange(min=1), default=1, show_default=True)
@click.option("--table", type=click.Choice([str(t) for t in TABLES]), default=None,
              help="Run the design of a published table and print its values alongside.")
@out_option
def cmd_experiment(ms, ks, ns, variant, reps, method, seed, threads, table, out):
    """Repeated simulate-and-fit study; one CSV row per cell."""
    try:
        if table is not None:
            specs = table_specs(int(table), seed=seed, reps=reps)
        else:
            if not (ms and ks and ns):
                raise click.UsageError("--m, --k and --n are required unless --table is given")
            specs = [
                ExperimentSpec(m=m, k=k, n=n, reps=reps or 50, method=method, seed=seed, variant=variant)
                for m in ms
                for k in ks
                for n in ns
            ]
    except (HarrisError, ValueError) as exc:
        raise click.UsageError(str(exc)) from None

    published = published_table(int(table)) if table is not None else None
    extra = [f"published_{f}" for f in ("m_hat", "m_hat_se", "k_hat", "k_hat_se")] if published else []
    with _csv_out(out) as w:
        w.writerow(REPORT_FIELDS + extra)
        for spec in specs:
            row = run_experiment(spec, threads).row()
            cells = [row[f] for f in REPORT_FIELDS]
            if published is not None:
                ref = published.get((spec.m, spec.k, spec.n), {})
                cells += ["NA" if ref.get(f) is None else f"{ref[f]:.5f}"
                          for f in ("m_hat", "m_hat_se", "k_hat", "k_hat_se")]
            w.writerow(cells)


def _grid(ms, ks):
    return [(m, k) for m in (ms or GRID_M) for k in (ks or GRID_K)]


@main.command("stability")
@click.option("--id", "do_id", is_flag=True, help="Infinite divisibility (n-th roots).")
@click.option("--sd", "do_sd", is_flag=True, help="Self-decomposability.")
@click.option("--identity", "do_identity", is_flag=True, help="Gamma Harris-sum identity.")
@click.option("--limit", "do_limit", is_flag=True, help="Limit laws of N_a as a grows.")
@click.option("--stopped", "do_stopped", is_flag=True, help="Harris-stopped gamma sums.")
@click.option("--variant", type=click.Choice(["h0", "h1"], case_sensitive=False), default="h0", show_default=True)
@click.option("--m", "ms", type=float, multiple=True)
@click.option("--k", "ks", type=int, multiple=True)
@click.option("--a", "as_", type=float, multiple=True)
@click.option("--c", "cs", type=float, multiple=True)
@click.option("--order", type=click.IntRange(min=1), default=None, help="Series truncation order.")
@click.option("--n", "n_mc", type=click.IntRange(min=0), default=100_000, show_default=True)
@click.option("--seed", type=click.IntRange(0, 2**64 - 1), default=0, show_default=True)
@out_option
def cmd_stability(do_id, do_sd, do_identity, do_limit, do_stopped, variant, ms, ks, as_, cs,
                  order, n_mc, seed, out):
    """Divisibility and stability checks; exit 4 if any fails."""
    if not any((do_id, do_sd, do_identity, do_limit, do_stopped)):
        do_id = do_sd = do_identity = do_limit = do_stopped = True
    rows = []

    def record(check, params, passed, witness):
        rows.append([check, params, "pass" if passed else "fail", witness])

    try:
        if do_id:
            for m, k in _grid(ms, ks):
                params = make_params(m, k, variant)
                for n in (2, 3, 7):
                    res = id_check(params, n, order or 60)
                    record("id", f"{params} n={n}", res.passed, res.witness)
        if do_sd:
            for m, k in _grid(ms, ks):
                params = make_params(m, k, variant)
                for c in cs or SD_C:
                    res = sd_check(params, c, order or 40)
                    record("sd", f"{params} c={c:g}", res.passed, res.witness)
        if do_identity:
            for a in as_ or (2.0, 10.0):
                for c in cs or (0.5, 1.0):
                    for k in ks or GRID_K:
                        resid = gamma_harris_identity(a, c, k, IDENTITY_T)
                        record("identity", f"a={a:g} c={c:g} k={k}", resid <= IDENTITY_TOL,
                               f"max_residual={resid:.3e}")
        if do_limit:
            for k in ks or (1, 2):
                rep = limit_law_check((10.0, 100.0, 1000.0), k, n_mc, RngStream(seed, 1000 + k))
                record("limit_pgf", f"k={k}", rep.pgf_decreasing,
                       f"P_a(0.5)={'>'.join(f'{v:.6f}' for v in rep.pgf_values[0.5])}")
                record("limit_lt", f"k={k}", rep.lt_shrinking,
                       f"sup_lt_distance={'>'.join(f'{d:.2e}' for d in rep.exact_lt_distance)}")
                if n_mc:
                    record("limit_moments", f"k={k} a=1000 n={n_mc}", rep.moments_ok(),
                           f"mean={rep.mean[-1]:.5f} var={rep.variance[-1]:.5f}")
                if rep.ks_exponential is not None:
                    record("limit_ks", f"k={k} a=1000 n={n_mc}", rep.ks_exponential <= 0.01,
                           f"ks={rep.ks_exponential:.5f}")
        if do_stopped and n_mc:
            for a in as_ or (2.0,):
                for c in cs or (1.0,):
                    for k in ks or (2,):
                        rep = stopped_sum_demo(a, c, k, n_mc, RngStream(seed, 2000 + k))
                        record("stopped_sum", f"a={a:g} c={c:g} k={k} n={n_mc}", rep.passed,
                               f"ks={rep.ks_distance:.5f}")
    except HarrisError as exc:
        raise click.UsageError(str(exc)) from None

    with _csv_out(out) as w:
        w.writerow(["check", "params", "result", "witness"])
        w.writerows(rows)
    failed = [r for r in rows if r[2] == "fail"]
    for r in failed:
        click.echo(f"FAILED {r[0]} {r[1]}: {r[3]}", err=True)
    if failed:
        sys.exit(EXIT_CHECK)


if __name__ == "__main__":
    main()
