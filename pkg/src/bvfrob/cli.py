"""Command line front end.

Every analysis runs in process by default; pass --server URL to send the
same request to a running service instead.  Exit status: 0 when the
analysis passed, 1 when it ran but the verdict is a failure, 2 when the
input could not be used at all.
"""
from __future__ import annotations

import sys

import click

from . import __version__, corpus
from .descriptions import InputError, load_document
from .pipeline import (DEFAULT_HBAR_ORDER, DEFAULT_KMAX, DEFAULT_TAU_ORDER,
                       handle)
from .reports import render

# service endpoints named after the verb, stages after the noun
_ENDPOINTS = {"validation": "validate"}


def _analysis_options(fn):
    opts = [
        click.argument("instance", required=False),
        click.option("--input", "input_path", type=click.Path(), default=None,
                      metavar="FILE",
                      help="JSON file holding a bv-algebra/1 document"),
        click.option("--seed", type=int, default=None,
                      help="replace the document's inner product by a seeded one"),
        click.option("--tau-order", type=int, default=DEFAULT_TAU_ORDER,
                      show_default=True,
                      help="order in the deformation variables"),
        click.option("--hbar-order", type=int, default=DEFAULT_HBAR_ORDER,
                      show_default=True,
                      help="order in the formal parameter"),
        click.option("--kmax", type=int, default=DEFAULT_KMAX,
                      show_default=True,
                      help="orders checked in the degeneration stage"),
        click.option("--format", "fmt",
                      type=click.Choice(["json", "markdown"]),
                      default="json", show_default=True),
        click.option("--server", default=None, metavar="URL",
                      help="POST the request to a running service"),
    ]
    for opt in reversed(opts):
        fn = opt(fn)
    return fn


def _document(instance: str | None, input_path: str | None) -> dict:
    if instance is not None and input_path is not None:
        raise click.UsageError(
            "give either an instance name or --input, not both")
    try:
        if input_path is not None:
            return load_document(input_path)
        if instance is not None:
            return corpus.load_doc(instance)
    except InputError as exc:
        raise click.UsageError(str(exc))
    raise click.UsageError("an instance name or --input FILE is required")


def _remote(server: str, stage: str, doc: dict, *, seed, tau_order,
            hbar_order, kmax, explicit) -> dict:
    import httpx

    endpoint = _ENDPOINTS.get(stage, stage)
    url = server.rstrip("/") + "/v1/" + endpoint
    # only send the knobs the user actually set, so the service records the
    # same parameter provenance an in-process run would
    payload: dict = {"document": doc}
    values = {"seed": seed, "tau_order": tau_order,
              "hbar_order": hbar_order, "kmax": kmax}
    for knob in explicit:
        payload[knob] = values[knob]
    try:
        resp = httpx.post(url, json=payload, timeout=600.0)
    except httpx.HTTPError as exc:
        raise click.UsageError(f"cannot reach {url}: {exc}")
    if resp.status_code >= 400:
        try:
            detail = resp.json().get("detail", resp.text)
        except ValueError:
            detail = resp.text
        raise click.UsageError(f"{endpoint}: {detail}")
    return resp.json()["report"]


def _execute(stage: str, instance, input_path, seed, tau_order, hbar_order,
             kmax, fmt, server) -> None:
    doc = _document(instance, input_path)
    ctx = click.get_current_context()
    explicit = frozenset(
        knob for knob in ("seed", "tau_order", "hbar_order", "kmax")
        if ctx.get_parameter_source(knob)
        is click.core.ParameterSource.COMMANDLINE)
    if server:
        report = _remote(server, stage, doc, seed=seed, tau_order=tau_order,
                         hbar_order=hbar_order, kmax=kmax, explicit=explicit)
    else:
        try:
            report = handle(stage, doc, seed=seed, tau_order=tau_order,
                            hbar_order=hbar_order, kmax=kmax,
                            explicit=explicit)
        except InputError as exc:
            raise click.UsageError(str(exc))
    click.echo(render(report, fmt), nl=False)
    if not report.get("passed", False):
        sys.exit(1)


@click.group()
@click.version_option(__version__, prog_name="bvfrob")
def main() -> None:
    """Exact analysis of finite BV algebra descriptions."""


@main.command()
@_analysis_options
def validate(**kw) -> None:
    """Check the algebra and operator axioms."""
    _execute("validation", **kw)


@main.command()
@_analysis_options
def cohomology(**kw) -> None:
    """Betti numbers and harmonic representatives."""
    _execute("cohomology", **kw)


@main.command()
@_analysis_options
def retract(**kw) -> None:
    """Build the harmonic retract and verify its identities."""
    _execute("retract", **kw)


@main.command()
@_analysis_options
def degeneration(**kw) -> None:
    """Order-by-order degeneration and the splitting map."""
    _execute("degeneration", **kw)


@main.command()
@_analysis_options
def cyclic(**kw) -> None:
    """Trace pairing, cyclicity, and homotopy compatibility."""
    _execute("cyclic", **kw)


@main.command()
@_analysis_options
def goodbasis(**kw) -> None:
    """Pairing concentration for the chosen basis of classes."""
    _execute("goodbasis", **kw)


@main.command()
@_analysis_options
def qme(**kw) -> None:
    """Solve the master equation order by order."""
    _execute("qme", **kw)


@main.command()
@_analysis_options
def frobenius(**kw) -> None:
    """Extract and verify the induced Frobenius structure."""
    _execute("frobenius", **kw)


@main.command()
@_analysis_options
def pipeline(**kw) -> None:
    """Run every stage in order, stopping at the first failure."""
    _execute("pipeline", **kw)


@main.command(name="corpus")
@click.option("--format", "fmt", type=click.Choice(["json", "markdown"]),
              default="json", show_default=True)
@click.option("--server", default=None, metavar="URL",
              help="query a running service instead")
def corpus_command(fmt: str, server: str | None) -> None:
    """List the bundled instances and their expected verdicts."""
    if server:
        import httpx

        url = server.rstrip("/") + "/v1/corpus"
        try:
            resp = httpx.get(url, timeout=60.0)
            resp.raise_for_status()
        except httpx.HTTPError as exc:
            raise click.UsageError(f"cannot reach {url}: {exc}")
        report = resp.json()
    else:
        report = {
            "positive": list(corpus.POSITIVE),
            "negative": list(corpus.NEGATIVE),
            "instances": [
                {"name": n, "expected": corpus.load_doc(n).get("expected", {})}
                for n in corpus.names()
            ],
        }
    click.echo(render(report, fmt), nl=False)


if __name__ == "__main__":
    main()
