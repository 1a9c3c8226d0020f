"""Command-line front end.

Exit codes: 0 success, 2 usage error, 3 domain/stability error,
4 numerical failure.
"""

from __future__ import annotations

import csv
import io
import json
import math
import sys
from decimal import ROUND_HALF_EVEN, Decimal

import click

from . import asymptotics, dimension as dim, erlang_a, exact, sim
from .control import SystemParams, gaussian_global, parse_policy
from .errors import (
    DegenerateControl,
    DomainError,
    NoRoot,
    NonConvergence,
    QuadratureFailure,
    Unstable,
)

EXIT_DOMAIN = 3
EXIT_NUMERIC = 4


def _round5(x: float) -> str:
    return str(Decimal(repr(float(x))).quantize(Decimal("0.00001"), rounding=ROUND_HALF_EVEN))


def _params(s, gamma, rho):
    if (gamma is None) == (rho is None):
        raise click.UsageError("exactly one of --gamma / --rho is required")
    if rho is not None:
        return SystemParams.from_rho(s, rho)
    return SystemParams(s=s, gamma=gamma)


def _emit(data, as_json, out, csv_rows=None, csv_header=None):
    """Write either a JSON document or key-value/CSV text."""
    if as_json:
        text = json.dumps(data, indent=2, default=float) + "\n"
    elif csv_rows is not None:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        if csv_header:
            writer.writerow(csv_header)
        writer.writerows(csv_rows)
        text = buf.getvalue()
    else:
        text = "".join(f"{k}\t{v}\n" for k, v in data.items())
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        click.echo(text, nl=False)


def _guarded(func):
    try:
        return func()
    except (DomainError, Unstable) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_DOMAIN)
    except (NonConvergence, QuadratureFailure, NoRoot, DegenerateControl) as exc:
        click.echo(f"numerical failure: {exc}", err=True)
        sys.exit(EXIT_NUMERIC)


@click.group()
def main():
    """Performance measures for many-server queues with scaled admission control."""


_policy_opt = click.option("--policy", "policy_spec", required=True,
                           help="const:t | linear:t | power:t,a | drift:p | gauss:t | "
                                "buffer:e | erlangB | erlangC | table:<path>")
_s_opt = click.option("--s", "s", type=int, required=True, help="number of servers")
_gamma_opt = click.option("--gamma", type=float, default=None, help="QED slack")
_rho_opt = click.option("--rho", type=float, default=None, help="traffic intensity")
_tol_opt = click.option("--tol", type=float, default=exact.DEFAULT_TOL)
_json_opt = click.option("--json", "as_json", is_flag=True, default=False)
_out_opt = click.option("--out", type=click.Path(), default=None)


@main.command("eval")
@_policy_opt
@_s_opt
@_gamma_opt
@_rho_opt
@_tol_opt
@_json_opt
@_out_opt
def cmd_eval(policy_spec, s, gamma, rho, tol, as_json, out):
    """Exact and asymptotic values of F_s, B_s, D_s, D_s^R."""

    def run():
        policy = parse_policy(policy_spec)
        params = _params(s, gamma, rho)
        report = exact.is_stable(policy, params)
        if not report.stable:
            raise Unstable(
                f"unstable: rho={report.rho:.6g} >= limit {report.rho_limit:.6g}"
            )
        pm = exact.perf_measures(policy, params, tol)
        data = {
            "policy": policy.label or policy_spec,
            "s": s,
            "gamma": params.gamma,
            "rho": params.rho,
            "F_s": pm.f_series,
            "B_s": pm.erlang_b,
            "D_s": pm.delay,
            "D_s_reject": pm.reject,
        }
        if policy.profile is not None:
            try:
                t1, t2, approx_d = asymptotics.corrected_delay(policy, params)
                t1r, t2r, approx_r = asymptotics.corrected_reject(policy, params)
                data.update({
                    "F_s_one_term": asymptotics.fs_one_term(policy, params),
                    "F_s_corrected": asymptotics.fs_corrected(policy, params, with_N=True),
                    "T1": t1,
                    "T2": t2,
                    "D_s_approx": approx_d,
                    "T1R": t1r,
                    "T2R": t2r,
                    "D_s_reject_approx": approx_r,
                })
            except DomainError:
                pass  # gamma at/below gamma_min: exact values only
        _emit(data, as_json, out)

    _guarded(run)


@main.command("table1")
@click.option("--gamma", type=float, default=0.1, show_default=True)
@_json_opt
@_out_opt
def cmd_table1(gamma, as_json, out):
    """Delay-probability comparison grid: s doubling 1..1024, theta in {1,10,100}."""

    def run():
        rows = []
        anomaly = {(1024, 100.0)}  # printed asymp cell inconsistent with recomputation
        for theta in (1.0, 10.0, 100.0):
            policy = gaussian_global(theta)
            for s in [2**k for k in range(11)]:
                params = SystemParams(s=s, gamma=gamma)
                b = exact.erlang_b(params)

                def delay(f):
                    return (1.0 + f) / (1.0 / b + f)

                d_exact = delay(erlang_a.fs_erlang_a_exact(theta, params))
                d_asymp = delay(erlang_a.fs_erlang_a_temme(theta, params))
                t1, _, d_approx = asymptotics.corrected_delay(policy, params)
                rows.append({
                    "s": s, "theta": theta,
                    "D_exact": _round5(d_exact),
                    "D_asymp": _round5(d_asymp),
                    "D_approx": _round5(d_approx),
                    "T1": _round5(t1),
                    "anomaly": int((s, theta) in anomaly),
                })
        if as_json:
            _emit(rows, True, out)
        else:
            header = ["s", "theta", "D_exact", "D_asymp", "D_approx", "T1", "anomaly"]
            _emit(None, False, out,
                  csv_rows=[[r[h] for h in header] for r in rows], csv_header=header)

    _guarded(run)


@main.command("sweep")
@click.option("--variable", type=click.Choice(["p", "eta", "gamma", "s"]), required=True)
@click.option("--s", "s", type=int, default=10, show_default=True)
@click.option("--rho", type=float, default=0.99, show_default=True)
@click.option("--points", type=int, default=50, show_default=True)
@_json_opt
@_out_opt
def cmd_sweep(variable, s, rho, points, as_json, out):
    """Sweep data for the delay probability.

    p-sweep compares global drift control f(x) = p^x with its local
    counterpart; eta-sweep compares exact and smooth-approximate delay
    under scaled-buffer control."""

    def run():
        from .control import buffer_global, const_local, drift_global

        params = SystemParams.from_rho(s, rho)
        rows = []
        if variable == "p":
            header = ["p", "D_global_exact", "D_local_exact", "D_approx"]
            for i in range(1, points + 1):
                p = i / (points + 1)
                g_pol = drift_global(p)
                l_pol = const_local(-math.log(p))
                row = [p]
                for pol in (g_pol, l_pol):
                    rep = exact.is_stable(pol, params)
                    row.append(exact.delay_prob(pol, params) if rep.stable else float("nan"))
                try:
                    row.append(asymptotics.corrected_delay(g_pol, params)[2])
                except DomainError:
                    row.append(float("nan"))
                rows.append(row)
        elif variable == "eta":
            header = ["eta", "D_exact", "D_approx"]
            for i in range(1, points + 1):
                eta = 3.0 * i / points
                pol = buffer_global(eta)
                d_exact = exact.delay_prob(pol, params)
                f42 = asymptotics.fs_corrected(pol, params)
                b = exact.erlang_b(params)
                rows.append([eta, d_exact, (1.0 + f42) / (1.0 / b + f42)])
        else:
            raise DomainError(f"sweep variable {variable!r} not implemented")
        if as_json:
            _emit([dict(zip(header, r)) for r in rows], True, out)
        else:
            _emit(None, False, out, csv_rows=rows, csv_header=header)

    _guarded(run)


@main.command("simulate")
@_policy_opt
@_s_opt
@_gamma_opt
@_rho_opt
@click.option("--horizon", type=float, required=True)
@click.option("--warmup", type=float, default=-1.0, help="default: 10*s time units")
@click.option("--reps", type=int, default=10, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@_json_opt
@_out_opt
def cmd_simulate(policy_spec, s, gamma, rho, horizon, warmup, reps, seed, as_json, out):
    """Monte Carlo estimates of delay and rejection probabilities."""

    def run():
        policy = parse_policy(policy_spec)
        params = _params(s, gamma, rho)
        config = sim.SimConfig(params=params, policy=policy, horizon=horizon,
                               warmup=warmup, replications=reps, seed=seed)
        res = sim.simulate(config)
        data = {
            "seed": seed,
            "replications": reps,
            "stable": res.stable,
            "delay": res.delay.point,
            "delay_half_width_95": res.delay.half_width_95,
            "reject": res.reject.point,
            "reject_half_width_95": res.reject.half_width_95,
        }
        if as_json:
            _emit(data, True, out)
        else:
            _emit(data, False, out)

    _guarded(run)


@main.command("histogram")
@_policy_opt
@_s_opt
@_gamma_opt
@_rho_opt
@click.option("--horizon", type=float, required=True)
@click.option("--warmup", type=float, default=-1.0)
@click.option("--reps", type=int, default=1, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@_out_opt
def cmd_histogram(policy_spec, s, gamma, rho, horizon, warmup, reps, seed, out):
    """Empirical stationary distribution as CSV (k,prob)."""

    def run():
        policy = parse_policy(policy_spec)
        params = _params(s, gamma, rho)
        config = sim.SimConfig(params=params, policy=policy, horizon=horizon,
                               warmup=warmup, replications=reps, seed=seed)
        res = sim.simulate(config)
        rows = [[k, p] for k, p in enumerate(res.hist) if p > 0]
        _emit(None, False, out, csv_rows=rows, csv_header=["k", "prob"])

    _guarded(run)


@main.command("path")
@_policy_opt
@_s_opt
@_gamma_opt
@_rho_opt
@click.option("--horizon", type=float, required=True)
@click.option("--sample-dt", type=float, default=1.0, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@_out_opt
def cmd_path(policy_spec, s, gamma, rho, horizon, sample_dt, seed, out):
    """Sampled normalized path X_s(t) as CSV (t,x)."""

    def run():
        policy = parse_policy(policy_spec)
        params = _params(s, gamma, rho)
        config = sim.SimConfig(params=params, policy=policy, horizon=horizon,
                               warmup=0.0, replications=1, seed=seed)
        path = sim.scaled_path(config, sample_dt)
        _emit(None, False, out, csv_rows=path.tolist(), csv_header=["t", "x"])

    _guarded(run)


@main.command("dimension")
@_policy_opt
@click.option("--epsilon", type=float, required=True)
@_s_opt
@_json_opt
@_out_opt
def cmd_dimension(policy_spec, epsilon, s, as_json, out):
    """Square-root staffing: gamma*, exact gamma_opt, and the optimality gap."""

    def run():
        policy = parse_policy(policy_spec)
        res = dim.optimality_gap(policy, s, epsilon)
        _emit(res, as_json, out)

    _guarded(run)


if __name__ == "__main__":
    main()
