"""Command-line front end: fit, ror, smaa and report over a project directory.

Exit codes: 1 invalid input, 2 infeasible preference model (zero blank-card
value), 3 solver failure. Errors are emitted as JSON on stderr.
"""

from __future__ import annotations

import json
import sys

import click

from . import lp
from .analyses import InfeasibleModel, execute
from .regression import InfeasiblePreferences
from .core import ValidationError
from .project import Project, ProjectError


def _fail(code, kind, message):
    sys.stderr.write(json.dumps({"error": kind, "message": str(message)}) + "\n")
    sys.exit(code)


def _run(project_dir, kind, options):
    try:
        project = Project.open(project_dir)
        run_id = project.new_run(kind, options)
        project.update_run(run_id, status="running")
        result, files = execute(project, kind, options)
        project.store_result(run_id, result, files)
        click.echo(json.dumps({"run": run_id, "result": result}, indent=2))
    except (InfeasibleModel, InfeasiblePreferences) as exc:
        _fail(2, "infeasible", exc)
    except (ValidationError, ProjectError, ValueError) as exc:
        _fail(1, "invalid-input", exc)
    except lp.SolverFailure as exc:
        _fail(3, "solver-failure", exc)


def _common(f):
    f = click.option("--project", "project_dir", required=True,
                     type=click.Path(exists=True, file_okay=False))(f)
    f = click.option("--model", type=click.Choice(["ws", "pl", "ga", "choquet2"]))(f)
    f = click.option("--scale", type=click.Choice(["ratio", "interval"]))(f)
    f = click.option("--node")(f)
    f = click.option("--eta-cap", type=float)(f)
    f = click.option("--epsilon", type=float)(f)
    return f


def _options(**kwargs):
    return {k: v for k, v in kwargs.items() if v is not None}


@click.group()
def main():
    """Deck-of-cards ordinal regression toolkit."""


@main.command()
@_common
def fit(project_dir, model, scale, node, eta_cap, epsilon):
    """Fit the value model to the stored preference information."""
    _run(project_dir, "fit", _options(model=model, scale=scale, node=node,
                                      eta_cap=eta_cap, epsilon=epsilon))


@main.command()
@_common
@click.option("--eta", type=float)
def ror(project_dir, model, scale, node, eta_cap, epsilon, eta):
    """Necessary and possible preference relations."""
    _run(project_dir, "ror", _options(model=model, scale=scale, node=node,
                                      eta_cap=eta_cap, epsilon=epsilon, eta=eta))


@main.command()
@_common
@click.option("--samples", type=int, default=100_000, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--eta", type=float)
def smaa(project_dir, model, scale, node, eta_cap, epsilon, samples, seed, eta):
    """Rank acceptability, pairwise winning, expected and barycenter rankings."""
    _run(project_dir, "smaa", _options(model=model, scale=scale, node=node,
                                       eta_cap=eta_cap, epsilon=epsilon,
                                       samples=samples, seed=seed, eta=eta))


@main.command()
@click.option("--project", "project_dir", required=True,
              type=click.Path(exists=True, file_okay=False))
def report(project_dir):
    """List stored runs with their staleness against current inputs."""
    try:
        project = Project.open(project_dir)
        runs = project.runs()
        for meta in runs:
            meta["stale"] = meta["input_hash"] != project.input_hash()
        click.echo(json.dumps({"project": project.meta, "runs": runs}, indent=2))
    except (ProjectError, ValidationError) as exc:
        _fail(1, "invalid-input", exc)


@main.command()
@click.option("--project", "project_dir", required=True, type=click.Path(file_okay=False))
@click.option("--id", "project_id")
def init(project_dir, project_id):
    """Create an empty project directory."""
    Project.create(project_dir, project_id)
    click.echo(json.dumps({"created": project_dir}))


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8400, show_default=True)
@click.option("--root", "root_dir", default=".", show_default=True,
              type=click.Path(file_okay=False))
def serve(host, port, root_dir):
    """Run the HTTP service."""
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(root_dir), host=host, port=port, log_level="warning")


if __name__ == "__main__":
    main()
