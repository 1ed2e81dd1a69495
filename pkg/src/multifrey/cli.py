"""Command-line interface."""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from . import BACKEND, __version__
from .eliminate import AuxiliaryPrimePlan, _bound_for, factor_bound, survivor_sweep
from .frey import OMEGA2, KLevel, ObjectKind
from .heckedata import dump_records
from .numfield import KElement, split_prime
from .prove import (
    THEOREMS,
    CapExceeded,
    FixtureStore,
    MissingFixtures,
    ProveOptions,
    dumps_certificate,
    prove,
    reverify,
    validate_certificate,
)
from .traces import BadReduction, count_points_C7, count_points_E, count_points_F, dump_trace_sets_csv

EXIT_COMPLETE = 0
EXIT_INCOMPLETE = 2
EXIT_MISSING = 3

DELTAS = {"1": KElement(1), "-7": KElement(-7), "w2": OMEGA2, "-7w2": -7 * OMEGA2}


def _int_list(ctx, param, value):
    if value is None:
        return None
    try:
        return tuple(int(x) for x in value.replace(" ", "").split(",") if x)
    except ValueError:
        raise click.BadParameter("expected a comma-separated list of integers")


@click.group()
@click.version_option(__version__, prog_name="multifrey")
def main() -> None:
    """Multi-Frey elimination for x^7 + y^7 = d z^p."""


@main.command("prove")
@click.option("--theorem", type=click.Choice(THEOREMS), required=True)
@click.option("--route", type=click.Choice(["elliptic-only", "j-max", "fastest"]), default=None,
              help="Override the route of a main-* theorem.")
@click.option("--fixtures", type=click.Path(exists=True, file_okay=False, path_type=Path), default=None)
@click.option("--aux-primes", callback=_int_list, default=None, help="Comma-separated auxiliary primes.")
@click.option("--max-enum", type=int, default=10_000, show_default=True, help="Cap on residue pairs per prime.")
@click.option("--witness-bound", type=int, default=60, show_default=True)
@click.option("--jobs", type=int, default=1, show_default=True)
@click.option("--out", type=click.Path(dir_okay=False, path_type=Path), default=None)
def cmd_prove(theorem, route, fixtures, aux_primes, max_enum, witness_bound, jobs, out):
    """Run a theorem's plan and write an elimination certificate."""
    store = FixtureStore.load(fixtures)
    opts = ProveOptions(aux_primes, max_enum, witness_bound, jobs)
    if route and not theorem.startswith("main-"):
        raise click.UsageError("--route only applies to main-* theorems")
    try:
        cert = prove(theorem, store, opts, route)
    except MissingFixtures as exc:
        click.echo("missing fixtures; supply eigenvalue files for these levels:", err=True)
        for lv in exc.levels:
            click.echo(f"  {lv}", err=True)
        sys.exit(EXIT_MISSING)
    except CapExceeded as exc:
        raise click.UsageError(str(exc))
    validate_certificate(cert)
    text = dumps_certificate(cert)
    if out:
        out.write_text(text, encoding="utf-8")
    else:
        click.echo(text, nl=False)
    for case in cert["cases"]:
        left = [f["label"] for f in case["forms"] if f["outcome"] == "survives"]
        click.echo(f"{case['case']}: {case['conclusion']}" + (f" (left: {', '.join(left)})" if left else ""), err=True)
    click.echo(f"conclusion: {cert['conclusion']}", err=True)
    sys.exit(EXIT_COMPLETE if cert["conclusion"] == "complete" else EXIT_INCOMPLETE)


@main.command("verify")
@click.argument("certificate", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--fixtures", type=click.Path(exists=True, file_okay=False, path_type=Path), default=None)
@click.option("--fraction", type=float, default=0.1, show_default=True)
@click.option("--seed", type=int, default=None)
def cmd_verify(certificate, fixtures, fraction, seed):
    """Validate a certificate and recompute a random sample of its bounds."""
    cert = json.loads(certificate.read_text(encoding="utf-8"))
    store = FixtureStore.load(fixtures)
    checked, bad = reverify(cert, store, fraction, seed)
    for line in bad:
        click.echo(line, err=True)
    click.echo(f"rechecked {checked} bounds, {len(bad)} mismatches")
    sys.exit(1 if bad else 0)


@main.command("fetch")
@click.option("--level", type=int, multiple=True, default=(196, 392), show_default=True)
@click.option("--bound", type=int, default=41, show_default=True, help="Eigenvalues for primes below this.")
@click.option("--out", type=click.Path(file_okay=False, path_type=Path), default=Path("."))
def cmd_fetch(level, bound, out):
    """Fetch classical newforms from LMFDB (base URL from FREY_LMFDB_URL)."""
    from .lmfdb import LMFDBError, fetch_classical_records

    out.mkdir(parents=True, exist_ok=True)
    for N in level:
        try:
            recs = fetch_classical_records(N, bound)
        except LMFDBError as exc:
            raise click.ClickException(str(exc))
        path = out / f"classical_{N}.json"
        dump_records(recs, path)
        click.echo(f"{path}: {len(recs)} forms")


@main.command("modsym")
@click.option("--level", type=int, multiple=True, default=(196, 392), show_default=True)
@click.option("--bound", type=int, default=41, show_default=True)
@click.option("--out", type=click.Path(file_okay=False, path_type=Path), default=Path("."))
def cmd_modsym(level, bound, out):
    """Compute classical newforms with modular symbols and write fixtures."""
    from .modsym import classical_newforms

    out.mkdir(parents=True, exist_ok=True)
    for N in level:
        recs = classical_newforms(N, bound)
        path = out / f"classical_{N}.json"
        dump_records(recs, path)
        click.echo(f"{path}: {len(recs)} forms, degrees {[r.degree for r in recs]}")


def _pairs(ctx, param, value):
    if value in (None, "all"):
        return None
    try:
        return [tuple(int(t) for t in p.split(",")) for p in value.split(";") if p]
    except ValueError:
        raise click.BadParameter("use 'all' or 'x,y;x,y;...'")


@main.command("tq")
@click.option("--q", "q", type=int, required=True)
@click.option("--pairs", callback=_pairs, default="all", show_default=True)
@click.option("--out", type=click.File("w"), default="-")
def cmd_tq(q, pairs, out):
    """Dump trace sets of Jac C7(x, y) at the primes above q as CSV."""
    if q in (2, 7):
        raise click.BadParameter("q must avoid 2 and 7", param_hint="--q")
    dump_trace_sets_csv(q, out, pairs)


@main.command("count")
@click.option("--curve", type=click.Choice(["E", "F", "C7"]), required=True)
@click.option("--a", "a", type=int, required=True)
@click.option("--b", "b", type=int, required=True)
@click.option("--q", "q", type=int, required=True)
@click.option("--k", "k", type=int, default=1, show_default=True, help="Extension degree (C7 only).")
@click.option("--delta", type=click.Choice(sorted(DELTAS)), default="1", show_default=True)
def cmd_count(curve, a, b, q, k, delta):
    """Point counts: #C7(F_{q^k}); #E(F_q); #F(residue field) for each prime above q."""
    try:
        if curve == "C7":
            click.echo(count_points_C7(a, b, q, k))
        elif curve == "E":
            click.echo(q + 1 - count_points_E(a, b, q))
        else:
            for P in split_prime(q):
                click.echo(f"{P}: {P.norm + 1 - count_points_F(a, b, DELTAS[delta], P)}")
    except BadReduction as exc:
        raise click.ClickException(str(exc))


@main.command("bounds")
@click.option("--level", required=True, help="Classical level N or an ideal such as q2q3, q2^3q3q7.")
@click.option("--q", "qs", callback=_int_list, required=True)
@click.option("--object", "kind", type=click.Choice(["E", "F", "J"]), default=None)
@click.option("--delta", type=click.Choice(sorted(DELTAS)), default="-7", show_default=True)
@click.option("--fixtures", type=click.Path(exists=True, file_okay=False, path_type=Path), default=None)
def cmd_bounds(level, qs, kind, delta, fixtures):
    """Per-form elimination bounds with factorizations and survivor sets."""
    lv = int(level) if level.isdigit() else KLevel.parse(level)
    kind = ObjectKind(kind or ("E" if isinstance(lv, int) else "F"))
    store = FixtureStore.load(fixtures)
    forms = store.get(lv)
    if forms is None:
        click.echo(f"no fixture for level {level}", err=True)
        sys.exit(EXIT_MISSING)
    d = DELTAS[delta] if kind is ObjectKind.F else None
    plans = [AuxiliaryPrimePlan(q) for q in qs]
    for form, rep in zip(forms, survivor_sweep(plans, forms, kind, d)):
        click.echo(f"{form.label} [{rep.fingerprint}]")
        for pl in plans:
            B = _bound_for(form, pl, kind, d)
            if B.zero:
                click.echo(f"  q={pl.q}: B = 0")
                continue
            fac = factor_bound(B.support())
            small = ",".join(str(p) for p in sorted(fac.primes))
            extra = f" unfactored={len(fac.unfactored)}" if fac.unfactored else ""
            click.echo(f"  q={pl.q}: primes {{{small}}}{extra}")
        tag = "self-survivor" if rep.self_survivor else "{" + ",".join(map(str, rep.survivors)) + "}"
        click.echo(f"  survivors: {tag}")


@main.command("info")
def cmd_info():
    """Show the kernel backend and version."""
    click.echo(f"multifrey {__version__} (kernels: {BACKEND})")


if __name__ == "__main__":
    main()
