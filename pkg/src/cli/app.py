"""Typer application exposing compilation, simulation and verification."""

import json
import logging
from contextlib import contextmanager
from pathlib import Path
from typing import Annotated, Any, Iterator, Optional

import typer

from src.components.optical_setup import export_dot, load_setup, require_valid, save_setup, serialize_setup
from src.components.physical_oracle import emission_oracle
from src.components.postselect_simulator import GaussianInt, simulate, success_probability
from src.components.setup_compiler import compile_setup, trace_to_json
from src.components.spin_algebra import CoupledLabel, bitstring, enumerate_coupled_basis
from src.components.verification import fidelity, sweep_basis, verify_label, write_csv
from src.config.settings import get_report_settings
from src.models.setup import OpticalSetup
from src.utils.exceptions import (
    CompilationError,
    InvalidSetupError,
    ReportExportError,
    SetupParseError,
    SimulationDomainError,
    SimulationResourceError,
    SpinDomainError,
)

logger = logging.getLogger(__name__)

EXIT_VERIFICATION_FAILED = 1
EXIT_INVALID_INPUT = 2
EXIT_IO_ERROR = 3

PROBABILITY_CONVENTION = "model convention"

_INVALID_INPUT = (
    SpinDomainError,
    SetupParseError,
    InvalidSetupError,
    SimulationDomainError,
    SimulationResourceError,
    CompilationError,
)

app = typer.Typer(
    help="Compile coupled-basis labels into optical setups, simulate the post-selected state and verify it.",
    add_completion=False,
    no_args_is_help=True,
)

JsonFlag = Annotated[bool, typer.Option("--json", help="Emit a JSON document instead of text.")]
ToleranceOption = Annotated[
    Optional[float], typer.Option("--tolerance", help="Comparison tolerance (default COUPLING_TOLERANCE).")
]
EfficiencyOption = Annotated[
    Optional[float], typer.Option("--efficiency", help="Per-photon efficiency in (0, 1] (default COUPLING_EFFICIENCY).")
]


@contextmanager
def _exit_codes() -> Iterator[None]:
    try:
        yield
    except _INVALID_INPUT as exc:
        logger.debug("Rejected input: %s", exc)
        typer.echo(f"error: {exc}", err=True)
        raise typer.Exit(code=EXIT_INVALID_INPUT) from exc
    except (ReportExportError, OSError) as exc:
        typer.echo(f"error: {exc}", err=True)
        raise typer.Exit(code=EXIT_IO_ERROR) from exc


def _wants_json(flag: bool) -> bool:
    return flag or get_report_settings().output_format == "json"


def _dump(payload: Any) -> None:
    typer.echo(json.dumps(payload, indent=2, ensure_ascii=False))


def _coefficient_json(value: GaussianInt | complex) -> dict[str, Any]:
    if isinstance(value, GaussianInt):
        return {"re": value.re, "im": value.im}
    return {"re": value.real + 0.0, "im": value.imag + 0.0}


def _setup_from(target: str) -> OpticalSetup:
    """Load TARGET as a setup document, or compile it when it reads as a label."""

    path = Path(target)
    # every label carries ';', so anything else is a path
    if path.is_file() or ";" not in target or path.suffix == ".json":
        return load_setup(path)
    setup, _ = compile_setup(CoupledLabel.parse(target))
    return setup


@app.callback()
def main(
    log_level: Annotated[
        Optional[str], typer.Option("--log-level", help="Root log level (default COUPLING_LOG_LEVEL).")
    ] = None,
) -> None:
    level = (log_level or get_report_settings().log_level).upper()
    logging.getLogger().setLevel(level)


@app.command()
def basis(n: int, as_json: JsonFlag = False) -> None:
    """List the 2^N coupled-basis labels in enumeration order."""

    with _exit_codes():
        labels = enumerate_coupled_basis(n)
    if _wants_json(as_json):
        _dump([str(label) for label in labels])
        return
    for label in labels:
        typer.echo(str(label))


@app.command("compile")
def compile_command(
    label: str,
    output: Annotated[Optional[Path], typer.Option("--output", "-o", help="Write the setup document here.")] = None,
    trace: Annotated[bool, typer.Option("--trace", help="Also emit the per-emitter compiler trace.")] = False,
) -> None:
    """Compile LABEL into its optical setup document."""

    with _exit_codes():
        setup, compiler_trace = compile_setup(CoupledLabel.parse(label))
        if output is not None:
            save_setup(setup, output)
            if trace:
                typer.echo(trace_to_json(compiler_trace), nl=False)
            return

    if trace:
        _dump({"setup": setup.model_dump(mode="json"), "trace": compiler_trace.model_dump(mode="json")})
        return
    typer.echo(serialize_setup(setup), nl=False)


@app.command("simulate")
def simulate_command(file: Path, as_json: JsonFlag = False, efficiency: EfficiencyOption = None) -> None:
    """Simulate the post-selected projection of the setup in FILE."""

    with _exit_codes():
        setup = load_setup(file)
        result = simulate(setup)
        probability = success_probability(setup, efficiency, projection=result.projection)

    if _wants_json(as_json):
        _dump(
            {
                "n": setup.n,
                "exact": result.projection.exact,
                "null_projection": result.null_projection,
                "projection": [
                    {"bits": bitstring(index, setup.n), **_coefficient_json(value)}
                    for index, value in result.projection.coefficients.items()
                ],
                "state": result.state.to_text().splitlines(),
                "success_probability": probability,
                "probability_convention": PROBABILITY_CONVENTION,
            }
        )
        return

    typer.echo("# projection")
    if result.null_projection:
        typer.echo("(null post-selection)")
    else:
        typer.echo(result.projection.to_text())
        typer.echo("# state")
        typer.echo(result.state.to_text())
    typer.echo(f"# success probability ({PROBABILITY_CONVENTION})")
    typer.echo(repr(probability))


@app.command()
def verify(
    label: str,
    as_json: JsonFlag = False,
    tolerance: ToleranceOption = None,
    efficiency: EfficiencyOption = None,
) -> None:
    """Compile, simulate and compare LABEL with its Clebsch-Gordan reference; exit 1 unless exact."""

    with _exit_codes():
        report = verify_label(CoupledLabel.parse(label), tolerance, efficiency)

    if _wants_json(as_json):
        _dump(report.model_dump(mode="json"))
    else:
        typer.echo(f"label: {report.label}")
        typer.echo(f"fidelity: {report.fidelity!r}")
        typer.echo(f"exact_match: {str(report.exact_match).lower()}")
        typer.echo(f"success_probability ({PROBABILITY_CONVENTION}): {report.success_probability!r}")
        typer.echo(f"null_projection: {str(report.null_projection).lower()}")

    if not report.exact_match:
        raise typer.Exit(code=EXIT_VERIFICATION_FAILED)


@app.command()
def sweep(
    n: int,
    csv_path: Annotated[Optional[Path], typer.Option("--csv", help="Also write the CSV report here.")] = None,
    workers: Annotated[Optional[int], typer.Option("--workers", help="Process pool size for the sweep.")] = None,
    as_json: JsonFlag = False,
    tolerance: ToleranceOption = None,
    efficiency: EfficiencyOption = None,
) -> None:
    """Verify every N-qubit coupled-basis label; exit 1 unless all are exact."""

    with _exit_codes():
        report = sweep_basis(n, tolerance, efficiency, workers)
        if csv_path is not None:
            write_csv(report, csv_path)

    output_format = get_report_settings().output_format
    if as_json or output_format == "json":
        _dump(report.model_dump(mode="json"))
    elif output_format == "csv":
        typer.echo(report.to_csv(), nl=False)
    else:
        typer.echo(f"{'label':<28} {'fidelity':>20} {'exact':>6} {'success_prob':>22}")
        for item in report.reports:
            typer.echo(
                f"{item.label:<28} {item.fidelity!r:>20} {str(item.exact_match).lower():>6} "
                f"{item.success_probability!r:>22}"
            )
        summary = report.summary
        typer.echo(
            f"# {summary.exact_matches}/{summary.labels} exact, min fidelity {summary.min_fidelity!r}, "
            f"gram deviation {summary.gram_deviation!r}"
        )
        typer.echo(
            f"# success probability ({PROBABILITY_CONVENTION}) "
            f"{summary.min_success_probability!r}..{summary.max_success_probability!r}"
        )

    if not report.summary.all_exact:
        raise typer.Exit(code=EXIT_VERIFICATION_FAILED)


@app.command()
def graph(target: str) -> None:
    """Print the fiber graph of a setup FILE, or of the setup compiled from a LABEL, as DOT."""

    with _exit_codes():
        setup = _setup_from(target)
        require_valid(setup)
    typer.echo(export_dot(setup), nl=False)


@app.command()
def oracle(file: Path, as_json: JsonFlag = False, efficiency: EfficiencyOption = None) -> None:
    """Compare the emission-superposition model with the permanent formula for the setup in FILE."""

    with _exit_codes():
        setup = load_setup(file)
        outcome = emission_oracle(setup, efficiency)
        result = simulate(setup)
        model_probability = success_probability(setup, efficiency, projection=result.projection)

    agreement = None if result.null_projection or outcome.probability == 0.0 else fidelity(outcome.state, result.state)
    if _wants_json(as_json):
        _dump(
            {
                "oracle_probability": outcome.probability,
                "model_probability": model_probability,
                "state_fidelity": agreement,
                "accepted_configurations": outcome.accepted_configurations,
            }
        )
        return
    typer.echo(f"oracle probability: {outcome.probability!r}")
    typer.echo(f"model probability ({PROBABILITY_CONVENTION}): {model_probability!r}")
    typer.echo(f"state fidelity: {agreement!r}")
