"""Command-line interface for Delaytron."""

import logging
import math
from contextlib import contextmanager
from typing import Any, Dict, Iterator, List, Optional, Sequence, Tuple

import click

from . import __version__
from .analytic import hv_intensity, hv_monte_carlo
from .circuits import Scheme, build_circuit, get_supported_schemes
from .exceptions import ConfigValidationError, DelaytronError
from .experiment import (
    DEFAULT_ALPHA_STEPS,
    DEFAULT_PHI_STEPS,
    DEFAULT_REPETITIONS,
    DEFAULT_SHOTS,
    IntensityRecord,
    Mode,
    SweepConfig,
    alpha_grid,
    compare_qm_hv,
    derive_seed,
    phi_grid,
    run_sweep,
    visibility_sweep,
)
from .gates import gate_arity, get_supported_gates
from .output import write_csv, write_manifest, write_report, write_table
from .parser import load_config, load_noise_model
from .svg import Series, angle_label, emit_svg_heatmap, emit_svg_lineplot

logger = logging.getLogger(__name__)

VISIBILITY_ALPHA_STEPS = 9
VISIBILITY_PHI_STEPS = 256
HV_MC_PHI_STEPS = 8
HV_MC_SAMPLES = 10**6


@contextmanager
def _reporting_errors(ctx: click.Context) -> Iterator[None]:
    """Turn library errors into ``Error: ...`` on stderr and exit code 1."""
    verbose = ctx.obj.get("verbose", False) if ctx.obj else False
    try:
        yield
    except DelaytronError as e:
        click.echo(f"Error: {e.message}", err=True)
        if verbose and e.details:
            click.echo(f"Details: {e.details}", err=True)
        ctx.exit(1)
    except Exception as e:
        logger.debug("Unexpected failure", exc_info=True)
        click.echo(f"Unexpected error: {e}", err=True)
        ctx.exit(1)


def _angles(values: Sequence[float], degrees: bool) -> Tuple[float, ...]:
    scale = math.pi / 180.0 if degrees else 1.0
    return tuple(v * scale for v in values)


def _alpha_values(alpha: Sequence[float], alpha_steps: Optional[int], degrees: bool, default_steps: int) -> Tuple[float, ...]:
    if alpha and alpha_steps is not None:
        raise ConfigValidationError("--alpha and --alpha-steps are mutually exclusive")
    if alpha:
        return _angles(alpha, degrees)
    return alpha_grid(alpha_steps if alpha_steps is not None else default_steps)


def _build_config(scheme: Scheme, options: Dict[str, Any], default_alpha_steps: int = DEFAULT_ALPHA_STEPS) -> SweepConfig:
    noise = load_noise_model(options["noise"]) if options.get("noise") else None
    return SweepConfig(
        scheme=scheme,
        alpha_values=_alpha_values(
            options["alpha"], options["alpha_steps"], options["degrees"], default_alpha_steps
        ),
        phi_values=phi_grid(options["phi_steps"]),
        mode=Mode(options["mode"]),
        shots=options["shots"],
        repetitions=options["reps"],
        seed=options["seed"],
        noise=noise,
        branch=options.get("branch"),
    )


def _sweep_options(default_phi_steps: int, with_branch: bool) -> Any:
    """Options shared by every sweep command."""

    def decorate(command: Any) -> Any:
        options = [
            click.option("--alpha", type=float, multiple=True, help="Ancilla angle (repeatable)"),
            click.option("--alpha-steps", type=int, default=None, help="Evenly spaced alphas over [0, pi/2]"),
            click.option("--phi-steps", type=int, default=default_phi_steps, show_default=True, help="Phases over one period"),
            click.option("--mode", type=click.Choice(["exact", "sampled"]), default="exact", show_default=True),
            click.option("--shots", type=int, default=DEFAULT_SHOTS, show_default=True, help="Shots per repetition"),
            click.option("--reps", type=int, default=DEFAULT_REPETITIONS, show_default=True, help="Repetitions per point"),
            click.option("--seed", type=int, default=0, show_default=True),
            click.option("--noise", type=click.Path(exists=True, dir_okay=False), help="Noise model or config file"),
            click.option("--degrees", is_flag=True, help="Read --alpha in degrees"),
            click.option("--workers", type=int, default=None, help="Threads for point evaluation"),
            click.option("--out", "-o", required=True, type=click.Path(dir_okay=False), help="Output CSV"),
            click.option("--svg", type=click.Path(dir_okay=False), help="Also render an SVG plot"),
        ]
        if with_branch:
            options.append(
                click.option("--branch", type=click.Choice(["0", "1"]), default=None, help="Keep one herald branch")
            )
        for option in reversed(options):
            command = option(command)
        return command

    return decorate


def _curves(records: Sequence[IntensityRecord]) -> List[Series]:
    grouped: Dict[Tuple[float, Optional[int]], List[Tuple[float, float]]] = {}
    for record in sorted(records, key=lambda r: r.sort_key):
        grouped.setdefault((record.alpha, record.branch), []).append((record.phi, record.e0))
    series = []
    for (alpha, branch), points in grouped.items():
        label = angle_label(alpha)
        if branch is not None:
            label = f"{label}, q2={branch}"
        series.append(Series(label, points))
    return series


def _intensity_grid(records: Sequence[IntensityRecord]) -> Tuple[List[float], List[float], List[List[float]]]:
    alphas = sorted({r.alpha for r in records})
    phis = sorted({r.phi for r in records})
    lookup = {(r.alpha, r.phi): r.e0 for r in records}
    return alphas, phis, [[lookup[(a, p)] for p in phis] for a in alphas]


def _emit_sweep(
    config: SweepConfig,
    command: str,
    out: str,
    svg: Optional[str],
    workers: Optional[int],
    heatmap: Optional[str] = None,
) -> None:
    records = run_sweep(config, max_workers=workers)
    write_csv(records, out)
    outputs = [out]
    if svg:
        emit_svg_lineplot(
            _curves(records), svg, y_label="D0 intensity", title=f"{config.scheme.value} ({config.mode.value})"
        )
        outputs.append(svg)
    if heatmap:
        alphas, phis, grid = _intensity_grid(records)
        emit_svg_heatmap(grid, heatmap, row_values=alphas, column_values=phis, title="D0 intensity")
        outputs.append(heatmap)
    write_manifest(out, config, outputs, command)
    click.echo(f"✓ Wrote {len(records)} record(s) to {out}")


@click.group()
@click.version_option(version=__version__, prog_name="delaytron")
@click.option("--verbose", "-v", is_flag=True, help="Enable debug logging and error details")
@click.pass_context
def cli(ctx: click.Context, verbose: bool) -> None:
    """Delaytron: delayed-choice interferometer experiments on a small qubit simulator."""
    ctx.ensure_object(dict)
    ctx.obj["verbose"] = verbose
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )


@cli.command()
@_sweep_options(DEFAULT_PHI_STEPS, with_branch=False)
@click.option("--heatmap", type=click.Path(dir_okay=False), help="Render the alpha x phi surface")
@click.pass_context
def qdce(ctx: click.Context, out: str, svg: Optional[str], workers: Optional[int], heatmap: Optional[str], **options: Any) -> None:
    """Sweep the single-ancilla delayed-choice circuit."""
    with _reporting_errors(ctx):
        config = _build_config(Scheme.QDCE, options)
        _emit_sweep(config, "qdce", out, svg, workers, heatmap=heatmap)


@cli.command("ea-qdce")
@_sweep_options(DEFAULT_PHI_STEPS, with_branch=True)
@click.pass_context
def ea_qdce(ctx: click.Context, out: str, svg: Optional[str], workers: Optional[int], branch: Optional[str], **options: Any) -> None:
    """Sweep the entanglement-assisted circuit, post-selecting on the herald qubit."""
    with _reporting_errors(ctx):
        options["branch"] = int(branch) if branch is not None else None
        config = _build_config(Scheme.EA_QDCE, options)
        _emit_sweep(config, "ea-qdce", out, svg, workers)


@cli.command()
@click.argument("config_file", type=click.Path(exists=True, dir_okay=False))
@click.option("--out", "-o", required=True, type=click.Path(dir_okay=False), help="Output CSV")
@click.option("--svg", type=click.Path(dir_okay=False), help="Also render an SVG plot")
@click.option("--workers", type=int, default=None, help="Threads for point evaluation")
@click.pass_context
def run(ctx: click.Context, config_file: str, out: str, svg: Optional[str], workers: Optional[int]) -> None:
    """Run the sweep described by a config file."""
    with _reporting_errors(ctx):
        config = load_config(config_file)
        _emit_sweep(config, "run", out, svg, workers)


@cli.command()
@_sweep_options(VISIBILITY_PHI_STEPS, with_branch=True)
@click.option(
    "--scheme",
    type=click.Choice(get_supported_schemes()),
    default=Scheme.QDCE.value,
    show_default=True,
)
@click.pass_context
def visibility(ctx: click.Context, out: str, svg: Optional[str], workers: Optional[int], branch: Optional[str], scheme: str, **options: Any) -> None:
    """Fringe visibility per alpha next to the noiseless law."""
    with _reporting_errors(ctx):
        options["branch"] = int(branch) if branch is not None else None
        config = _build_config(Scheme(scheme), options, default_alpha_steps=VISIBILITY_ALPHA_STEPS)
        points = visibility_sweep(config, max_workers=workers)
        write_table(
            out,
            ["scheme", "alpha", "branch", "visibility", "theory"],
            [(config.scheme, p.alpha, p.branch, p.visibility, p.theory) for p in points],
        )
        outputs = [out]
        if svg:
            series = []
            for branch_value in sorted({p.branch for p in points}, key=lambda b: -1 if b is None else b):
                suffix = "" if branch_value is None else f" q2={branch_value}"
                chosen = [p for p in points if p.branch == branch_value]
                series.append(Series(f"simulated{suffix}", [(p.alpha, p.visibility) for p in chosen]))
                series.append(Series(f"theory{suffix}", [(p.alpha, p.theory) for p in chosen]))
            emit_svg_lineplot(series, svg, x_label="α (rad)", y_label="visibility", title="Fringe visibility")
            outputs.append(svg)
        write_manifest(out, config, outputs, "visibility")
        click.echo(f"✓ Wrote {len(points)} visibility value(s) to {out}")


@cli.command("compare-hv")
@click.option("--alpha", type=float, multiple=True, help="Ancilla angle (repeatable)")
@click.option("--alpha-steps", type=int, default=None, help="Evenly spaced alphas over [0, pi/2]")
@click.option("--phi-steps", type=int, default=DEFAULT_PHI_STEPS, show_default=True)
@click.option("--branch", type=click.Choice(["0", "1"]), default="0", show_default=True)
@click.option("--degrees", is_flag=True, help="Read --alpha in degrees")
@click.option("--out", "-o", required=True, type=click.Path(dir_okay=False), help="Output CSV")
@click.option("--svg", type=click.Path(dir_okay=False), help="Also render an SVG plot")
@click.option("--report", type=click.Path(dir_okay=False), help="Markdown report (default <out>.report.md)")
@click.pass_context
def compare_hv(
    ctx: click.Context,
    alpha: Tuple[float, ...],
    alpha_steps: Optional[int],
    phi_steps: int,
    branch: str,
    degrees: bool,
    out: str,
    svg: Optional[str],
    report: Optional[str],
) -> None:
    """Compare simulated post-selected intensities with the hidden-variable model."""
    with _reporting_errors(ctx):
        alphas = _alpha_values(alpha, alpha_steps, degrees, DEFAULT_ALPHA_STEPS)
        table = compare_qm_hv(alphas, phi_grid(phi_steps), branch=int(branch))
        write_table(
            out,
            ["alpha", "phi", "branch", "qm_e0", "qm_joint_e0", "hv_e0", "divergence"],
            [
                (r.alpha, r.phi, r.branch, r.qm_e0, r.qm_joint_e0, r.hv_e0, r.divergence)
                for r in table.rows
            ],
        )
        report_path = report or f"{out}.report.md"
        write_report(table, report_path)
        outputs = [out, report_path]
        if svg:
            series = [Series(f"QM {angle_label(a)}", table.qm_curve(a)) for a in alphas]
            series.append(Series("HV", table.hv_curve(alphas[0])))
            emit_svg_lineplot(series, svg, y_label="D0 intensity", title=f"QM vs HV, q2={branch}")
            outputs.append(svg)
        write_manifest(
            out,
            None,
            outputs,
            "compare-hv",
            {"alpha_values": list(alphas), "phi_steps": phi_steps, "branch": int(branch)},
        )
        for entry in table.max_divergence:
            click.echo(f"  {angle_label(entry.alpha)}: max |QM - HV| = {entry.value:.6g} at φ={entry.phi:.4g}")
        click.echo(f"✓ Wrote comparison to {out} and report to {report_path}")


@cli.command("hv-mc")
@click.option("--phi", type=float, multiple=True, help="Phase (repeatable)")
@click.option("--phi-steps", type=int, default=HV_MC_PHI_STEPS, show_default=True)
@click.option("--samples", type=int, default=HV_MC_SAMPLES, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--degrees", is_flag=True, help="Read --phi in degrees")
@click.option("--out", "-o", required=True, type=click.Path(dir_okay=False), help="Output CSV")
@click.option("--svg", type=click.Path(dir_okay=False), help="Also render an SVG plot")
@click.pass_context
def hv_mc(
    ctx: click.Context,
    phi: Tuple[float, ...],
    phi_steps: int,
    samples: int,
    seed: int,
    degrees: bool,
    out: str,
    svg: Optional[str],
) -> None:
    """Monte Carlo estimate of the hidden-variable D0 intensity."""
    with _reporting_errors(ctx):
        if seed < 0:
            raise ConfigValidationError(f"seed: must be a non-negative integer, got {seed}")
        phis = _angles(phi, degrees) if phi else phi_grid(phi_steps)
        rows = []
        for index, value in enumerate(phis):
            estimate = hv_monte_carlo(value, samples, derive_seed(seed, index, 0))
            theory = hv_intensity(value)
            rows.append((value, estimate, theory, math.sqrt(theory * (1.0 - theory) / samples)))
        write_table(out, ["phi", "hv_mc", "hv_theory", "stderr"], rows)
        outputs = [out]
        if svg:
            emit_svg_lineplot(
                [
                    Series("Monte Carlo", [(r[0], r[1]) for r in rows]),
                    Series("1/4 + cos²(φ/2)/2", [(r[0], r[2]) for r in rows]),
                ],
                svg,
                y_label="D0 intensity",
                title="Hidden-variable model",
            )
            outputs.append(svg)
        write_manifest(out, None, outputs, "hv-mc", {"phi_values": list(phis), "samples": samples, "seed": seed})
        click.echo(f"✓ Wrote {len(rows)} estimate(s) to {out}")


@cli.command()
@click.option("--scheme", type=click.Choice(get_supported_schemes()), default=Scheme.QDCE.value, show_default=True)
@click.option("--alpha", type=float, default=0.0, show_default=True)
@click.option("--phi", type=float, default=0.0, show_default=True)
@click.option("--degrees", is_flag=True, help="Read angles in degrees")
@click.option("--summary", is_flag=True, help="Print a summary instead of the JSON document")
@click.pass_context
def circuit(ctx: click.Context, scheme: str, alpha: float, phi: float, degrees: bool, summary: bool) -> None:
    """Print the gate list of a delayed-choice circuit."""
    with _reporting_errors(ctx):
        alpha_rad, phi_rad = _angles((alpha, phi), degrees)
        built = build_circuit(Scheme(scheme), phi_rad, alpha_rad)
        if not summary:
            click.echo(built.to_json())
            return
        info = built.summary()
        click.echo(f"Circuit Summary ({info['scheme']}):")
        click.echo(f"  Qubits: {info['n_qubits']}")
        click.echo(f"  Gate Count: {info['gate_count']}")
        click.echo(f"  Depth: {info['depth']}")
        click.echo(f"  Gates: {', '.join(info['gates'])}")
        if info["physical_qubits"]:
            click.echo(f"  Physical Qubits: {', '.join(info['physical_qubits'])}")


@cli.command()
def gates() -> None:
    """List supported gate kinds."""
    supported = get_supported_gates()

    click.echo("Supported Gates:")
    click.echo("=" * 30)

    for kind in supported:
        targets, controls, params = gate_arity(kind)
        click.echo(f"  • {kind} (targets={targets}, controls={controls}, params={params})")

    click.echo(f"\nTotal: {len(supported)} gates supported")


def main(argv: Optional[List[str]] = None) -> int:
    """Run the CLI and return its exit code."""
    try:
        result = cli.main(args=argv, prog_name="delaytron", standalone_mode=False)
    except click.ClickException as e:
        e.show()
        return e.exit_code
    except click.Abort:
        click.echo("Aborted!", err=True)
        return 1
    return result if isinstance(result, int) else 0


if __name__ == "__main__":
    raise SystemExit(main())
