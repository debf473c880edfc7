"""Command line: ``immersion-kernel [flags] COMMAND ...``.

Exit codes: 0 success, 2 NO-instance, 64 bad input or usage, 65 invalid
family, 69 resource guard exceeded.
"""
from __future__ import annotations

import json
import os
import sys
from typing import Any, Callable, Dict, Optional

import click

from . import __version__, api, io
from .errors import FamilyInvalidError, GraphInputError, PreconditionError, ResourceLimitError
from .schemas import GenRequest, GenResponse, Report

EXIT_OK, EXIT_NO, EXIT_PARSE, EXIT_FAMILY, EXIT_RESOURCE = 0, 2, 64, 65, 69

_KIND_EXIT = {"parse": EXIT_PARSE, "precondition": EXIT_PARSE, "family": EXIT_FAMILY, "resource": EXIT_RESOURCE}


class CliFailure(Exception):
    def __init__(self, code: int, message: str) -> None:
        super().__init__(message)
        self.code = code


def _exit_code(exc: Exception) -> Optional[int]:
    if isinstance(exc, FamilyInvalidError):
        return EXIT_FAMILY
    if isinstance(exc, (GraphInputError, PreconditionError)):
        return EXIT_PARSE
    if isinstance(exc, ResourceLimitError):
        return EXIT_RESOURCE
    return None


# ---- shared flags: accepted before or after the command name

_FLAGS = [
    click.option("--family", default=None, help="theta2, theta3, k4 or a family JSON file [theta2]"),
    click.option("--seed", type=int, default=None, help="seed for every randomized choice [0]"),
    click.option("--format", "fmt", type=click.Choice(["json", "text"]), default=None, help="report format [json]"),
    click.option("--immersion-respecting", is_flag=True, default=None,
                 help="replacements must be rooted immersions of what they replace"),
    click.option("--max-oracle-edges", type=int, default=None, help="edge guard for the brute-force oracle [25]"),
    click.option("--table", "table", default=None, type=click.Path(dir_okay=False),
                 help="replacement table file to load and extend"),
    click.option("--server", default=None, help="send the request to a running service at this URL"),
]

_DEFAULTS: Dict[str, Any] = {
    "family": "theta2", "seed": 0, "fmt": "json", "immersion_respecting": False,
    "max_oracle_edges": 25, "table": None, "server": None,
}


def _flags(f: Callable) -> Callable:
    for opt in reversed(_FLAGS):
        f = opt(f)
    return f


def _settings(ctx: click.Context, local: Dict[str, Any]) -> Dict[str, Any]:
    out = dict(_DEFAULTS)
    for src in (ctx.obj or {}, local):
        out.update({k: v for k, v in src.items() if k in _DEFAULTS and v is not None})
    return out


def _config(s: Dict[str, Any]) -> Dict[str, Any]:
    return {
        "family": s["family"],
        "family_doc": _family_doc(s["family"]),
        "seed": s["seed"],
        "immersion_respecting": s["immersion_respecting"],
        "max_oracle_edges": s["max_oracle_edges"],
        "table": s["table"],
    }


def _family_doc(value: str) -> Optional[Dict[str, Any]]:
    # family files travel inline so a remote service sees the same family
    if not os.path.isfile(value):
        return None
    try:
        with open(value) as fh:
            data = json.load(fh)
    except (OSError, ValueError) as exc:
        raise FamilyInvalidError(f"cannot read family file {value}: {exc}") from None
    if not isinstance(data, dict):
        raise FamilyInvalidError("family file must hold a JSON object")
    return data


def _read(path: str) -> str:
    try:
        with open(path) as fh:
            return fh.read()
    except OSError as exc:
        raise GraphInputError(f"cannot read {path}: {exc}") from None


def _call(s: Dict[str, Any], command: str, payload: Dict[str, Any]):
    if s["server"]:
        return _remote(s["server"], command, payload)
    if command == "gen":
        return api.gen(GenRequest(**payload))
    return api.HANDLERS[command](api.REQUESTS[command](**payload))


def _remote(url: str, command: str, payload: Dict[str, Any]):
    import httpx

    try:
        resp = httpx.post(url.rstrip("/") + "/" + command, json=payload, timeout=None)
    except httpx.HTTPError as exc:
        raise CliFailure(EXIT_RESOURCE, f"service unreachable: {exc}") from None
    body = resp.json()
    if resp.status_code != 200:
        kind = body.get("kind", "parse") if isinstance(body, dict) else "parse"
        raise CliFailure(_KIND_EXIT.get(kind, EXIT_PARSE), body.get("message", str(body)) if isinstance(body, dict) else str(body))
    return GenResponse.model_validate(body) if command == "gen" else Report.model_validate(body)


def _text(doc: Dict[str, Any]) -> str:
    lines = [f"command: {doc['command']}", f"family: {doc['family']}", f"status: {doc['status']}"]
    sol = doc["solution"]
    lines.append("solution: " + ("-" if sol is None else " ".join(map(str, sol)) or "(empty)"))
    lines.append(f"verified: {str(doc['verified']).lower()}")
    lines.append(f"opt_bound: {'-' if doc['opt_bound'] is None else doc['opt_bound']}")
    st = doc["stats"]
    lines.append(f"stats: iterations={st['iterations']} replacements={st['replacements']} prunings={st['prunings']}")
    for key in sorted(doc["details"]):
        val = doc["details"][key]
        if isinstance(val, (dict, list)):
            continue
        lines.append(f"{key}: {val}")
    return "\n".join(lines) + "\n"


def _emit(s: Dict[str, Any], report: Report) -> None:
    doc = report.doc()
    click.echo(io.dumps(doc) if s["fmt"] == "json" else _text(doc), nl=False)
    if report.status == "no":
        raise CliFailure(EXIT_NO, "")


@click.group(context_settings={"help_option_names": ["-h", "--help"]})
@click.version_option(__version__, prog_name="immersion-kernel")
@_flags
@click.pass_context
def cli(ctx: click.Context, **flags: Any) -> None:
    """Edge deletion to exclude immersions: approximation, kernels, exact solving."""
    ctx.obj = flags


def _instance_command(name: str, help_text: str, budget: bool = False):
    def body(ctx: click.Context, instance: str, k: Optional[int] = None, **flags: Any) -> None:
        s = _settings(ctx, flags)
        payload = dict(_config(s), instance=_read(instance))
        if budget:
            payload["k"] = k
        _emit(s, _call(s, name, payload))

    body.__doc__ = help_text
    cmd = body
    if budget:
        cmd = click.option("-k", "k", type=click.IntRange(min=0), required=True, help="deletion budget")(cmd)
    cmd = _flags(cmd)
    cmd = click.argument("instance", type=click.Path(exists=True, dir_okay=False))(cmd)
    cmd = click.pass_context(cmd)
    return cli.command(name)(cmd)


_instance_command("solve", "Exact solution of size <= k, or NO (exit 2).", budget=True)
_instance_command("approx", "Verified constant-factor approximate deletion set.")
_instance_command("free", "Whether the instance contains no family member as an immersion.")
_instance_command("oracle", "Exact OPT by brute force (guarded by --max-oracle-edges).")


@cli.command("kernel")
@click.argument("instance", type=click.Path(exists=True, dir_okay=False))
@click.option("-k", "k", type=click.IntRange(min=0), required=True, help="deletion budget")
@click.option("-o", "--output", default=None, type=click.Path(dir_okay=False),
              help="reduced instance file [INSTANCE.kernel]")
@click.option("--trace", "trace_path", default=None, type=click.Path(dir_okay=False),
              help="trace JSON file [OUTPUT.trace.json]")
@_flags
@click.pass_context
def kernel_cmd(ctx: click.Context, instance: str, k: int, output: Optional[str], trace_path: Optional[str],
               **flags: Any) -> None:
    """Equivalent instance with at most c_ker*k edges plus its trace, or NO (exit 2)."""
    s = _settings(ctx, flags)
    report = _call(s, "kernel", dict(_config(s), instance=_read(instance), k=k))
    if report.status == "ok":
        output = output or instance + ".kernel"
        trace_path = trace_path or output + ".trace.json"
        details = dict(report.details)
        with open(output, "w") as fh:
            fh.write(details.pop("kernel_instance"))
        with open(trace_path, "w") as fh:
            fh.write(io.dumps(details.pop("trace")))
        details["kernel_file"] = output
        details["trace_file"] = trace_path
        report = report.model_copy(update={"details": details})
    _emit(s, report)


@cli.command("tctw")
@click.argument("instance", type=click.Path(exists=True, dir_okay=False))
@click.option("--decomposition", "dec_path", default=None, type=click.Path(dir_okay=False),
              help="also write the optimal decomposition JSON here")
@_flags
@click.pass_context
def tctw_cmd(ctx: click.Context, instance: str, dec_path: Optional[str], **flags: Any) -> None:
    """Exact tree-cut width with an optimal decomposition."""
    s = _settings(ctx, flags)
    report = _call(s, "tctw", dict(_config(s), instance=_read(instance)))
    if dec_path:
        with open(dec_path, "w") as fh:
            fh.write(io.dumps(report.details["decomposition"]))
    _emit(s, report)


@cli.command("gen")
@click.option("--model", type=click.Choice(["uniform-multigraph", "planted-protrusion", "planted-bouquet"]),
              default="uniform-multigraph", show_default=True)
@click.option("-n", "n", type=click.IntRange(min=0), default=None, help="vertices (planted models derive it if omitted)")
@click.option("-m", "m", type=click.IntRange(min=0), default=None, help="edges (checked against planted models)")
@click.option("-k", "k", type=click.IntRange(min=1), default=1, show_default=True, help="planted OPT")
@click.option("--count", type=click.IntRange(min=1), default=None, help="bouquet elements [dF]")
@click.option("-o", "--output", default=None, type=click.Path(dir_okay=False), help="instance file [stdout]")
@click.option("--sidecar", default=None, type=click.Path(dir_okay=False),
              help="ground-truth JSON [OUTPUT.truth.json when OUTPUT is given]")
@_flags
@click.pass_context
def gen_cmd(ctx: click.Context, model: str, n, m, k: int, count, output, sidecar, **flags: Any) -> None:
    """Seeded random or planted instance."""
    s = _settings(ctx, flags)
    payload = dict(_config(s), model=model, n=n, m=m, k=k, count=count)
    res = _call(s, "gen", payload)
    if output:
        with open(output, "w") as fh:
            fh.write(res.instance)
        sidecar = sidecar or output + ".truth.json"
    else:
        click.echo(res.instance, nl=False)
    if sidecar:
        with open(sidecar, "w") as fh:
            fh.write(io.dumps(res.truth))


@cli.command("serve")
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8000, show_default=True)
def serve_cmd(host: str, port: int) -> None:
    """Run the HTTP service."""
    import uvicorn

    uvicorn.run("immersion_kernel.service:app", host=host, port=port)


def main(argv=None) -> int:
    try:
        cli.main(args=argv, prog_name="immersion-kernel", standalone_mode=False)
    except click.exceptions.Exit as exc:
        return exc.exit_code
    except click.UsageError as exc:
        exc.show()
        return EXIT_PARSE
    except click.Abort:
        click.echo("aborted", err=True)
        return 1
    except CliFailure as exc:
        if str(exc):
            click.echo(f"error: {exc}", err=True)
        return exc.code
    except Exception as exc:  # noqa: BLE001  mapped to exit codes below
        code = _exit_code(exc)
        if code is None:
            raise
        click.echo(f"error: {exc}", err=True)
        return code
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
