"""Command-line interface.

Decision commands exit 0 when the answer is true, 1 when it is false and 2
on any error.  Other commands exit 0 on success and 2 on error.
"""
from __future__ import annotations

import json
import sys
import time
from pathlib import Path

import click

from . import deciders, funcgraph, oracle, reductions
from ._accel import backend
from .errors import TrapkitError
from .model import io
from .model.convert import convert
from .model.types import BooleanNetwork, FunctionalGraph, Hypercube

ENGINES = ("auto", "symbolic", "graph", "oracle")
AUTO_GRAPH_LIMIT = 14


def _emit(ctx_json: bool, payload: dict, lines: list[str]):
    if ctx_json:
        click.echo(json.dumps(payload, sort_keys=True))
    else:
        for line in lines:
            click.echo(line)


def _load(path, fmt, seed):
    return io.load(path, fmt, seed=seed)


def _resolve_engine(model, engine: str) -> str:
    if isinstance(model, FunctionalGraph):
        if engine in ("symbolic", "oracle"):
            raise TrapkitError(f"engine {engine!r} needs local functions; a .fg model only supports 'graph'")
        return "graph"
    if engine == "auto":
        return "graph" if model.n <= AUTO_GRAPH_LIMIT else "symbolic"
    return engine


def _graph_of(model):
    if isinstance(model, FunctionalGraph):
        return model
    return funcgraph.build_functional_graph(model)


def _witness_json(w):
    if w is None:
        return None
    if isinstance(w, deciders.Escape):
        out = {"component": w.component, "config": str(w.config)}
        if w.successor is not None:
            out["successor"] = str(w.successor)
        return out
    return {"trap_space": str(w.cube), "seed": None if w.seed is None else str(w.seed)}


def _witness_text(w):
    if w is None:
        return []
    if isinstance(w, deciders.Escape):
        s = f"witness: component {w.component} escapes at {w.config}"
        if w.successor is not None:
            s += f" (successor {w.successor})"
        return [s]
    return [f"witness: smaller trap space {w.cube}" + (f" (from {w.seed})" if w.seed else "")]


def _run(fn):
    """Map library errors to exit code 2 with a one-line message."""
    try:
        return fn()
    except (TrapkitError, ValueError, OSError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)


def _decide(ctx, model_file, fmt, engine, as_json, problem, arg):
    seed = ctx.obj["seed"]

    def body():
        model = _load(model_file, fmt, seed)
        eng = _resolve_engine(model, engine)
        t0 = time.perf_counter()
        closure = None
        if eng == "oracle":
            if problem == "trapspace":
                answer = oracle.oracle_trapspace(model, arg)
            elif problem == "mintrap":
                answer = oracle.oracle_mintrap(model, arg)
            else:
                answer = oracle.oracle_in_mintrap(model, arg)
                closure = oracle.oracle_closure(model, Hypercube(str(arg)))
            verdict = deciders.TrapVerdict(answer, None, closure)
        elif eng == "graph":
            G = _graph_of(model)
            fn = {"trapspace": funcgraph.trapspace_g, "mintrap": funcgraph.mintrap_g,
                  "in-mintrap": funcgraph.in_mintrap_g}[problem]
            verdict = fn(G, arg)
        else:
            fn = {"trapspace": deciders.trapspace, "mintrap": deciders.mintrap,
                  "in-mintrap": deciders.in_mintrap}[problem]
            verdict = fn(model, arg)
        ms = (time.perf_counter() - t0) * 1000
        payload = {
            "answer": verdict.answer,
            "witness": _witness_json(verdict.witness),
            "time_ms": round(ms, 3),
            "engine": eng,
        }
        if problem == "in-mintrap":
            payload["closure"] = None if verdict.closure is None else str(verdict.closure)
        lines = [str(verdict.answer).lower()]
        if verdict.closure is not None:
            lines.append(f"closure: {verdict.closure}")
        lines += _witness_text(verdict.witness)
        _emit(as_json, payload, lines)
        return verdict.answer

    answer = _run(body)
    sys.exit(0 if answer else 1)


model_arg = click.argument("model_file", type=click.Path(exists=True, dir_okay=False))
format_opt = click.option(
    "--format", "fmt", type=click.Choice(io.FORMATS), default=None,
    help="Model format (default: from the file extension).",
)
engine_opt = click.option(
    "--engine", type=click.Choice(ENGINES), default="auto", show_default=True,
    help=f"Backend; auto uses the functional graph when n <= {AUTO_GRAPH_LIMIT}.",
)
json_opt = click.option("--json", "as_json", is_flag=True, help="Machine-readable output.")


@click.group()
@click.option("--seed", type=int, default=0, show_default=True, help="Seed for all sampling.")
@click.pass_context
def main(ctx, seed):
    """Trap spaces and minimal trap spaces of Boolean networks."""
    ctx.ensure_object(dict)
    ctx.obj["seed"] = seed


@main.command()
@model_arg
@click.option("--cube", required=True, help="Hypercube over {0,1,*}, component 1 leftmost.")
@format_opt
@engine_opt
@json_opt
@click.pass_context
def trapspace(ctx, model_file, cube, fmt, engine, as_json):
    """Is CUBE closed under the network?"""
    _decide(ctx, model_file, fmt, engine, as_json, "trapspace", cube)


@main.command()
@model_arg
@click.option("--cube", required=True, help="Hypercube over {0,1,*}.")
@format_opt
@engine_opt
@json_opt
@click.pass_context
def mintrap(ctx, model_file, cube, fmt, engine, as_json):
    """Is CUBE a minimal trap space?"""
    _decide(ctx, model_file, fmt, engine, as_json, "mintrap", cube)


@main.command("in-mintrap")
@model_arg
@click.option("--config", "config", required=True, help="Configuration over {0,1}.")
@format_opt
@engine_opt
@json_opt
@click.pass_context
def in_mintrap(ctx, model_file, config, fmt, engine, as_json):
    """Does CONFIG lie in a minimal trap space?"""
    _decide(ctx, model_file, fmt, engine, as_json, "in-mintrap", config)


@main.command()
@model_arg
@click.option("--from", "seed_cube", required=True, help="Configuration or hypercube to saturate.")
@format_opt
@engine_opt
@json_opt
@click.pass_context
def saturate(ctx, model_file, seed_cube, fmt, engine, as_json):
    """Print the smallest trap space containing the seed."""

    def body():
        model = _load(model_file, fmt, ctx.obj["seed"])
        eng = _resolve_engine(model, engine)
        g = Hypercube(seed_cube)
        t0 = time.perf_counter()
        if eng == "graph":
            G = _graph_of(model)
            if g.n != G.n:
                raise TrapkitError(f"seed {g} has length {g.n}, model has {G.n} components")
            result = funcgraph.saturate(G, funcgraph.VertexSet(G.n, funcgraph.cube_ranks(g)))
        elif eng == "oracle":
            result = oracle.oracle_closure(model, g)
        else:
            result = deciders.compute_T(model, g)
        ms = (time.perf_counter() - t0) * 1000
        _emit(as_json, {"closure": str(result), "time_ms": round(ms, 3), "engine": eng}, [str(result)])

    _run(body)


@main.command("min-trapspaces")
@model_arg
@click.option("--oracle", "use_oracle", is_flag=True, help="Exhaustive enumeration (small n).")
@format_opt
@json_opt
@click.pass_context
def min_trapspaces(ctx, model_file, use_oracle, fmt, as_json):
    """List all minimal trap spaces.

    Without --oracle, every terminal SCC of the functional graph is
    saturated and the closures that are minimal are kept.
    """

    def body():
        model = _load(model_file, fmt, ctx.obj["seed"])
        if use_oracle:
            if isinstance(model, FunctionalGraph):
                raise TrapkitError("--oracle needs local functions, not a .fg model")
            found = oracle.enumerate_minimal_trap_spaces(model)
        else:
            G = _graph_of(model)
            found = sorted({funcgraph.saturate(G, W) for W in funcgraph.terminal_sccs(G)})
            found = [h for h in found if funcgraph.mintrap_g(G, h).answer]
        cells = [str(h) for h in found]
        _emit(as_json, {"minimal_trap_spaces": cells}, cells)

    _run(body)


@main.command()
@model_arg
@click.option("--dot", is_flag=True, help="Emit Graphviz DOT instead of the .fg listing.")
@click.option("--cube", default=None, help="Restrict the DOT rendering to this hypercube.")
@click.option("-o", "--output", type=click.Path(dir_okay=False), default=None)
@format_opt
@click.pass_context
def graph(ctx, model_file, dot, cube, output, fmt):
    """Build the functional graph."""

    def body():
        model = _load(model_file, fmt, ctx.obj["seed"])
        G = _graph_of(model)
        if dot:
            names = model.component_names() if isinstance(model, BooleanNetwork) else None
            text = funcgraph.to_dot(G, cube, names)
        else:
            text = io.serialize(G, "fg")
        if output:
            Path(output).write_text(text)
        else:
            click.echo(text, nl=False)

    _run(body)


@main.command()
@click.argument("kind", type=click.Choice(reductions.GENERATORS))
@click.argument("instance_file", type=click.Path(exists=True, dir_okay=False))
@click.option("-o", "--output", required=True, type=click.Path(dir_okay=False))
@click.option(
    "--encoding", type=click.Choice(("formula", "tt", "bdd", "dnf01")), default="formula",
    show_default=True, help="Post-conversion (chain generator only for non-formula).",
)
@click.pass_context
def generate(ctx, kind, instance_file, output, encoding):
    """Build a reduction network and a sidecar manifest (OUTPUT.manifest.json)."""

    def body():
        inst = reductions.reduce_instance(kind, Path(instance_file).read_text())
        net = inst.network
        if encoding != "formula":
            if kind != "chain":
                raise TrapkitError("--encoding other than formula is only bounded for the chain generator")
            net = convert(net, encoding)
        io.dump(net, output, encoding)
        manifest = inst.manifest()
        manifest.update(
            generator=kind,
            instance=str(instance_file),
            encoding=encoding,
            names=list(net.component_names()),
            seed=ctx.obj["seed"],
        )
        Path(str(output) + ".manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")
        click.echo(f"wrote {output} ({net.n} components), target {inst.target_hypercube}")

    _run(body)


@main.command("convert")
@model_arg
@click.option("--to", "target", required=True, type=click.Choice(("formula", "tt", "bdd", "dnf01", "fg")))
@click.option("-o", "--output", type=click.Path(dir_okay=False), default=None)
@format_opt
@click.pass_context
def convert_cmd(ctx, model_file, target, output, fmt):
    """Re-encode a model."""

    def body():
        model = _load(model_file, fmt, ctx.obj["seed"])
        if isinstance(model, FunctionalGraph):
            raise TrapkitError("a .fg model has no local functions to convert")
        net = model if target == "fg" else convert(model, target)
        text = io.serialize(net, target)
        if output:
            Path(output).write_text(text)
        else:
            click.echo(text, nl=False)

    _run(body)


@main.command()
def info():
    """Show the active kernel backend."""
    click.echo(f"kernels: {backend()}")


if __name__ == "__main__":  # pragma: no cover
    main()
