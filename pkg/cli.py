import logging
import os
import sys
from pathlib import Path

import click
from dotenv import load_dotenv

from dao.surface_config import load_config
from models.errors import SurfaceCheckError
from models.models import Backend
from services.runner import run

load_dotenv()

EXIT_USAGE = 1
TRACE_DIRECTIONS = ("xi", "v")

logger = logging.getLogger(__name__)


class CheckGroup(click.Group):
    """Click group whose usage errors exit with 1; status 2 means a failing check."""

    def main(self, args=None, prog_name=None, complete_var=None, standalone_mode=True, **extra):
        try:
            rv = super().main(args, prog_name, complete_var, standalone_mode=False, **extra)
        except click.ClickException as e:
            e.show()
            sys.exit(EXIT_USAGE)
        except click.exceptions.Abort:
            click.echo("Aborted!", err=True)
            sys.exit(EXIT_USAGE)
        sys.exit(rv if isinstance(rv, int) else 0)


def _parse_point(ctx, param, value):
    if value is None:
        return None
    try:
        u1, u2 = (float(part) for part in value.split(","))
    except ValueError:
        raise click.BadParameter("expected two comma-separated numbers, e.g. 0.1,-0.2")
    return u1, u2


def _parse_trace(ctx, param, value):
    if value is None:
        return None
    direction = value[2:] if value.startswith("w=") else value
    if direction not in TRACE_DIRECTIONS:
        raise click.BadParameter(f"expected one of xi, v, w=xi, w=v; got {value!r}")
    return direction


@click.group(cls=CheckGroup)
def cli():
    """Half-lightlike surface verification workbench."""
    logging.basicConfig(
        level=os.getenv("LOG_LEVEL", "WARNING").upper(),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )


@cli.command()
@click.argument("config_path", type=click.Path(dir_okay=False))
@click.option("--point", callback=_parse_point, help="Single parameter point u1,u2 with full section terms.")
@click.option("--backend", type=click.Choice([b.value for b in Backend]), help="Derivative backend.")
@click.option("--tol", type=click.FloatRange(min=0, min_open=True), help="Override the primary tolerance.")
@click.option("--report", "report_path", default="-", show_default=True, help="Where to write the JSON report.")
@click.option("--trace", callback=_parse_trace, metavar="[w=]xi|v",
              help="Emit traced section samples for this direction.")
def check(config_path, point, backend, tol, report_path, trace):
    """Run the checks of a surface definition file."""
    try:
        config = load_config(config_path)
        report = run(
            config,
            backend=backend,
            tol=tol,
            points=[point] if point else None,
            trace=trace,
            deep=point is not None,
        )
    except SurfaceCheckError as e:
        click.echo(f"error: {e}", err=True)
        return EXIT_USAGE

    if report_path == "-":
        click.echo(report.to_json())
    else:
        Path(report_path).write_text(report.to_json() + "\n")
    click.echo(report.summary(), err=True)
    return report.exit_code


if __name__ == "__main__":
    cli()
