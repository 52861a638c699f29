"""
Command-line surface. Every subcommand writes one table (CSV by default,
JSON with --format json) to --output or stdout; logs go to stderr.
"""
import logging
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from itertools import product
from typing import Callable, Dict, List, Optional, Sequence

import click
import numpy as np
from pydantic import ValidationError

from jacobi.equilibrium import band_structure, blend_density_forms, periodic_density_forms
from jacobi.errors import ConfigError, NumericalError
from jacobi.kernel import christoffel_ratio, error_ledger, kernel, scaling_kernel
from jacobi.oracles import constant_coefficient_oracle, gaussian_oracle
from jacobi.oscsum import (canonical_spec, curved_spec, lemma_bound_ratio, normalized_exponential_sum,
                           random_spec, sinc_limit_prediction, sinc_limit_sum)
from jacobi.params import ClassTag, ParameterModel, load_model
from jacobi.poly import eval_poly_derivative, eval_poly_sequence
from utils.settings import ExperimentConfig, configure_logging, get_settings
from utils.table_io import emit, write_json

logger = logging.getLogger(__name__)

MODELS_DIR = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), "models")

ORACLES = {
    "chebyshev-u": constant_coefficient_oracle,
    "hermite": gaussian_oracle,
}


# --------------------------------------------------------------------------
# Parameter types
# --------------------------------------------------------------------------

def parse_number(token: str) -> float:
    """A float, or a multiple/fraction of pi: 'pi', '-2pi', '0.5*pi', 'pi/4'"""
    text = token.strip().lower().replace(" ", "")
    if "pi" not in text:
        return float(text)
    coef, _, rest = text.partition("pi")
    coef = coef.rstrip("*")
    scale = {"": 1.0, "+": 1.0, "-": -1.0}.get(coef)
    if scale is None:
        scale = float(coef)
    if rest:
        if not rest.startswith("/"):
            raise ValueError(f"cannot parse {token!r}")
        scale /= float(rest[1:])
    return scale * math.pi


def parse_count(token: str) -> int:
    """Integers, also written as '1e5'"""
    value = float(token)
    if not value.is_integer():
        raise ValueError(f"{token!r} is not an integer")
    return int(value)


class CommaList(click.ParamType):
    """Comma-separated list of numbers"""

    def __init__(self, parse: Callable[[str], object], name: str):
        self.parse = parse
        self.name = name

    def convert(self, value, param, ctx):
        if isinstance(value, list):
            return value
        try:
            return [self.parse(part) for part in str(value).split(",") if part.strip()]
        except ValueError as e:
            self.fail(f"{value!r}: {e}", param, ctx)


FLOATS = CommaList(parse_number, "floats")
COUNTS = CommaList(parse_count, "counts")


# --------------------------------------------------------------------------
# Helpers
# --------------------------------------------------------------------------

def resolve_model(path: str) -> ParameterModel:
    """A model file path, or the name of a file shipped in models/"""
    if path is None:
        raise ConfigError("--model is required")
    if not os.path.exists(path):
        shipped = os.path.join(MODELS_DIR, path if path.endswith(".json") else f"{path}.json")
        if os.path.exists(shipped):
            path = shipped
    return load_model(path)


def make_config(**fields) -> ExperimentConfig:
    try:
        return ExperimentConfig(**{k: v for k, v in fields.items() if v is not None})
    except ValidationError as e:
        raise ConfigError(f"invalid run configuration: {e}") from e


def sweep(fn: Callable, tasks: Sequence) -> List:
    """fn over tasks on a thread pool capped by CDKLAB_THREADS; results keep task order"""
    if not tasks:
        return []
    workers = max(1, min(get_settings().threads, len(tasks)))
    if workers == 1:
        return [fn(*task) for task in tasks]
    with ThreadPoolExecutor(max_workers=workers) as executor:
        return list(executor.map(lambda task: fn(*task), tasks))


def write_table(config: ExperimentConfig, rows: List[Dict], columns: Sequence[str]) -> None:
    emit(rows, columns, fmt=config.format, path=config.output, stream=sys.stdout)


def output_options(fn):
    fn = click.option("--format", "fmt", type=click.Choice(["csv", "json"]), default="csv",
                      show_default=True, help="Table format")(fn)
    fn = click.option("--output", "-o", type=click.Path(dir_okay=False), default=None,
                      help="Write the table here instead of stdout")(fn)
    return fn


# --------------------------------------------------------------------------
# Commands
# --------------------------------------------------------------------------

@click.group()
@click.option("--log-level", default=None, help="Override CDKLAB_LOG_LEVEL")
def cli(log_level: Optional[str]):
    """Numerical lab for Jacobi parameters, Christoffel-Darboux kernels and oscillatory sums."""
    configure_logging(log_level.upper() if log_level else None)


@cli.command()
@click.option("--model", required=True, help="Model JSON file, or a name from models/")
@click.option("--x", "xs", type=FLOATS, default="0", show_default=True)
@click.option("--n", "ns", type=COUNTS, default="10", show_default=True, help="Highest degree (last entry used)")
@click.option("--k", "shift", type=int, default=0, show_default=True, help="Associated polynomial shift")
@click.option("--derivative", is_flag=True, help="Also report p_n'(x)")
@output_options
def poly(model, xs, ns, shift, derivative, output, fmt):
    """p^[k]_0(x) .. p^[k]_n(x)."""
    config = make_config(command="poly", model=model, n=ns, x=xs, output=output, format=fmt)
    m = resolve_model(config.model)
    n_max = config.n[-1]
    grid = np.asarray(config.x, dtype=float)

    values = eval_poly_sequence(m, shift, grid, n_max).values
    deriv = eval_poly_derivative(m, grid, max(n_max, 1)).deriv_values if derivative and shift == 0 else None
    if derivative and shift != 0:
        raise ConfigError("--derivative is only available for k = 0")

    rows = []
    for col, x in enumerate(config.x):
        for j in range(n_max + 1):
            row = {"x": x, "n": j, "p": float(values[j, col])}
            if deriv is not None:
                row["dp"] = float(deriv[j, col])
            rows.append(row)
    write_table(config, rows, ["x", "n", "p"] + (["dp"] if deriv is not None else []))
    return 0


@cli.command("kernel")
@click.option("--model", required=True)
@click.option("--n", "ns", type=COUNTS, required=True)
@click.option("--x", "xs", type=FLOATS, default="0", show_default=True)
@click.option("--y", "ys", type=FLOATS, default=None, help="Second arguments; the diagonal when omitted")
@output_options
def kernel_command(model, ns, xs, ys, output, fmt):
    """K_n(x, y) by direct sum and by the Christoffel-Darboux formula."""
    config = make_config(command="kernel", model=model, n=ns, x=xs, v=ys, output=output, format=fmt)
    m = resolve_model(config.model)
    tasks = [(m, n, x, y) for n in config.n for x in config.x for y in (ys or [x])]
    reports = sweep(kernel, tasks)
    rows = [{"n": r.n, "x": r.x, "y": r.y, "K_direct": r.K_direct, "K_cd": r.K_cd,
             "rho": r.rho, "overflow": r.overflow_flag} for r in reports]
    write_table(config, rows, ["n", "x", "y", "K_direct", "K_cd", "rho", "overflow"])
    return 0


@cli.command()
@click.option("--model", required=True)
@click.option("--n", "ns", type=COUNTS, required=True)
@click.option("--x", "xs", type=FLOATS, default="0", show_default=True)
@click.option("--i", "index", default="all", show_default=True, help="'all' or a residue class index")
@click.option("--oracle", type=click.Choice(sorted(ORACLES)), default=None,
              help="Known density for absolute predictions and E_n")
@click.option("--ledger-grid", type=FLOATS, default=None, help="x-grid for the error ledger")
@output_options
def ratio(model, ns, xs, index, oracle, ledger_grid, output, fmt):
    """Normalized Christoffel functions and the mu'-free estimate mu_hat."""
    config = make_config(command="ratio", model=model, n=ns, x=xs, output=output, format=fmt)
    m = resolve_model(config.model)
    if index != "all":
        try:
            index = int(index)
        except ValueError:
            raise ConfigError(f"--i must be 'all' or an integer, got {index!r}")
    density = ORACLES[oracle]() if oracle else None

    tasks = [(m, index, n, x, density, ledger_grid) for n in config.n for x in config.x]
    reports = sweep(christoffel_ratio, tasks)
    rows = [{"n": r.n, "x": r.x, "K": r.K_direct, "rho": r.rho, "ratio": r.ratio, "ratio_alt": r.ratio_alt,
             "mu_hat": r.mu_hat, "predicted": r.predicted, "error": r.observed_error, "ledger": r.bound_ledger}
            for r in reports]
    write_table(config, rows, ["n", "x", "K", "rho", "ratio", "ratio_alt", "mu_hat", "predicted", "error", "ledger"])
    return 0


@cli.command()
@click.option("--model", required=True)
@click.option("--n", "ns", type=COUNTS, required=True)
@click.option("--x", "xs", type=FLOATS, default="0", show_default=True)
@click.option("--u", "us", type=FLOATS, default="0", show_default=True)
@click.option("--v", "vs", type=FLOATS, default="0", show_default=True)
@output_options
def scaling(model, ns, xs, us, vs, output, fmt):
    """Universality ratio K_n(x + u/rho_n, x + v/rho_n) / K_n(x, x) against the sine kernel."""
    config = make_config(command="scaling", model=model, n=ns, x=xs, u=us, v=vs, output=output, format=fmt)
    m = resolve_model(config.model)
    tasks = [(m, n, x, u, v) for n in config.n for x, u, v in product(config.x, config.u, config.v)]
    reports = sweep(scaling_kernel, tasks)
    rows = [dict(r.as_row(), mu_hat=r.mu_hat) for r in reports]
    write_table(config, rows, ["n", "x", "u", "v", "K_direct", "K_cd", "rho", "ratio", "predicted", "error",
                               "mu_hat"])
    return 0


@cli.command()
@click.option("--model", required=True)
@click.option("--samples", type=int, default=16, show_default=True, help="Density samples per band")
@click.option("--format", "fmt", type=click.Choice(["csv", "json"]), default="json", show_default=True)
@click.option("--output", "-o", type=click.Path(dir_okay=False), default=None)
def bands(model, samples, fmt, output):
    """Band set of the model's envelope (or blend limit) with density samples."""
    config = make_config(command="bands", model=model, output=output, format=fmt)
    structure = band_structure(resolve_model(config.model))
    if config.format == "json":
        payload = structure.to_json(samples_per_band=samples)
        if config.output:
            with open(config.output, "w", encoding="utf-8") as fh:
                write_json(payload, fh)
        else:
            write_json(payload, sys.stdout)
        return 0
    rows = [{"left": l, "right": r} for l, r in structure.intervals]
    write_table(config, rows, ["left", "right"])
    return 0


@cli.command()
@click.option("--model", required=True)
@click.option("--x", "xs", type=FLOATS, default="0", show_default=True)
@output_options
def density(model, xs, output, fmt):
    """Equilibrium density at x in both closed forms; 0 off the band set."""
    config = make_config(command="density", model=model, x=xs, output=output, format=fmt)
    m = resolve_model(config.model)
    structure = band_structure(m)
    forms = blend_density_forms if m.class_tag is ClassTag.PERIODIC_BLEND else periodic_density_forms

    def row(x: float) -> Dict:
        if not structure.contains(x):
            return {"x": x, "in_band": False, "omega_prime": 0.0, "sum_form": None, "trace_form": None}
        sum_form, trace_form = forms(m.envelope, x)
        return {"x": x, "in_band": True, "omega_prime": sum_form, "sum_form": sum_form, "trace_form": trace_form}

    rows = sweep(row, [(x,) for x in config.x])
    write_table(config, rows, ["x", "in_band", "omega_prime", "sum_form", "trace_form"])
    return 0


@cli.command()
@click.option("--fixture", type=click.Choice(["canonical", "curved", "random"]), default="canonical",
              show_default=True)
@click.option("--n", "ns", type=COUNTS, required=True)
@click.option("--x", "xs", type=FLOATS, default="0", show_default=True)
@click.option("--a", "a", type=FLOATS, default="0", show_default=True, help="Left offsets of the sinc sums")
@click.option("--b", "b", type=FLOATS, default="1", show_default=True, help="Right offsets of the sinc sums")
@click.option("--seed", type=int, default=0, show_default=True)
@output_options
def oscsum(fixture, ns, xs, a, b, seed, output, fmt):
    """Weighted exponential sums, their bound constant and the sinc-limit sums."""
    config = make_config(command="oscsum", n=ns, x=xs, u=a, v=b, output=output, format=fmt, seed=seed)
    if fixture == "random":
        spec = random_spec(np.random.default_rng(config.seed))
    else:
        spec = canonical_spec() if fixture == "canonical" else curved_spec()

    def row(n: int, x: float, left: float, right: float) -> Dict:
        lhs, rhs, constant = lemma_bound_ratio(spec, n, x)
        return {
            "fixture": spec.name, "n": n, "x": x, "a": left, "b": right,
            "normalized": normalized_exponential_sum(spec, n, x),
            "abs_sum": lhs, "bound": rhs, "constant": constant,
            "sinc_sum": sinc_limit_sum(spec, n, x, left, right),
            "sinc_limit": sinc_limit_prediction(spec, x, left, right),
        }

    if len(config.u) != len(config.v):
        raise ConfigError("--a and --b must have the same length")
    tasks = [(n, x, left, right) for n in config.n for x in config.x for left, right in zip(config.u, config.v)]
    rows = sweep(row, tasks)
    write_table(config, rows, ["fixture", "n", "x", "a", "b", "normalized", "abs_sum", "bound", "constant",
                               "sinc_sum", "sinc_limit"])
    return 0


@cli.command()
@click.option("--model", required=True)
@click.option("--n", "ns", type=COUNTS, required=True)
@click.option("--grid", "grid", type=FLOATS, default="0", show_default=True, help="x-grid for the sup norms")
@click.option("--i", "index", type=int, default=0, show_default=True)
@click.option("--form", type=click.Choice(["full", "subsequence"]), default="full", show_default=True)
@click.option("--tail-cap", type=int, default=None, help="Windows kept in each tail (default 4(n+1))")
@output_options
def ledger(model, ns, grid, index, form, tail_cap, output, fmt):
    """Error-ledger sums bounding the Christoffel error terms."""
    config = make_config(command="ledger", model=model, n=ns, x=grid, output=output, format=fmt)
    m = resolve_model(config.model)
    tasks = [(m, index, n, config.x, form, tail_cap) for n in config.n]
    values = sweep(error_ledger, tasks)
    rows = [{"n": n, "i": index, "form": form, "ledger": value} for n, value in zip(config.n, values)]
    write_table(config, rows, ["n", "i", "form", "ledger"])
    return 0


@cli.command()
@click.option("--only", multiple=True, help="Criterion id or position; repeatable")
@click.option("--tolerance", type=float, default=1.0, show_default=True, help="Multiplier on every threshold")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--report", type=click.Path(dir_okay=False), default=None, help="Also write a PDF report")
def suite(only, tolerance, seed, report):
    """Run the acceptance battery and print PASS/FAIL per criterion."""
    from suite_graph import run_suite

    if tolerance <= 0:
        raise ConfigError(f"--tolerance must be positive, got {tolerance}")
    tokens = [part for item in only for part in item.split(",") if part.strip()]
    outcome = run_suite(tokens, tolerance=tolerance, seed=seed, report_path=report)
    if not outcome["results"] and outcome.get("error"):
        click.echo(f"ERROR {outcome['error']}")
        return 1

    for r in outcome["results"]:
        verdict = "PASS" if r["passed"] else "FAIL"
        click.echo(f"{verdict} {r['id']} ({r['seconds']:.2f}s) {r.get('detail') or r.get('error', '')}")
    click.echo(outcome["summary"])
    if report and not outcome.get("report"):
        logger.warning(f"⚠️ report could not be written to {report}")
    return 0 if outcome["success"] else 1


# --------------------------------------------------------------------------
# Entry points
# --------------------------------------------------------------------------

def run(argv: Optional[Sequence[str]] = None) -> int:
    """Run the CLI and map failures to exit codes: 2 config, 1 numerical or failed suite, 0 ok"""
    try:
        result = cli.main(args=list(argv) if argv is not None else None, prog_name="cdklab",
                          standalone_mode=False)
    except click.exceptions.ClickException as e:
        e.show()
        return e.exit_code
    except click.exceptions.Abort:
        click.echo("Aborted!", err=True)
        return 1
    except ConfigError as e:
        logger.error(f"❌ Configuration error: {e}")
        click.echo(f"Error: {e}", err=True)
        return 2
    except NumericalError as e:
        logger.error(f"❌ Numerical failure: {e}")
        click.echo(f"Error: {e}", err=True)
        return 1
    return result if isinstance(result, int) else 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
