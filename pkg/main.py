"""Main entry point for Histoseg"""

import asyncio
import logging
import sys
from typing import Any, Optional, Sequence

import click

from amg.predictors import resolve_predictor_name
from config import parse_value_list, resolve_run_config, settings
from core.exceptions import ConfigError, HistosegError, PartialFailureError
from orchestrator import Orchestrator
from ui.progress import ConsoleProgress

logger = logging.getLogger(__name__)

# CLI parameter name -> location in the nested run configuration
FLAG_PATHS: dict[str, tuple[str, ...]] = {
    "manifest": ("paths", "manifest"),
    "stack": ("paths", "stack"),
    "gt": ("paths", "gt"),
    "out": ("paths", "out"),
    "pred_dir": ("paths", "pred_dir"),
    "guidance": ("paths", "guidance"),
    "proposals": ("paths", "proposals"),
    "center_threshold": ("ais", "center_threshold"),
    "boundary_threshold": ("ais", "boundary_threshold"),
    "foreground_threshold": ("ais", "foreground_threshold"),
    "sigma": ("ais", "smoothing_sigma"),
    "min_size": ("ais", "min_instance_size"),
    "points_per_side": ("amg", "points_per_side"),
    "confidence_min": ("amg", "confidence_min"),
    "dedup_iou": ("amg", "dedup_iou"),
    "min_area": ("amg", "min_area"),
    "predictor": ("predictor", "name"),
    "region_grow_threshold": ("predictor", "region_grow_threshold"),
    "start": ("interactive", "start"),
    "iterations": ("interactive", "n_corrections"),
    "mask_prompt": ("interactive", "use_mask_prompt"),
    "sampling": ("interactive", "sampling"),
    "tile": ("wsi", "tile"),
    "halo": ("wsi", "halo"),
    "merge_iou": ("wsi", "merge_iou"),
    "tiled_output": ("wsi", "tiled_output"),
    "grid": ("center_grid",),
    "boundary_grid": ("boundary_grid",),
    "iou_threshold": ("iou_threshold",),
    "thresholds": ("thresholds",),
    "curve": ("curve",),
    "num_classes": ("num_classes",),
    "jobs": ("jobs",),
    "seed": ("seed",),
    "report_format": ("report_format",),
    "label_format": ("label_format",),
}


def build_overrides(params: dict[str, Any]) -> dict[str, Any]:
    """Nest flat CLI parameters into run-config shape; unset (None) flags are dropped"""
    overrides: dict[str, Any] = {}
    for name, value in params.items():
        if value is None or name not in FLAG_PATHS:
            continue
        *parents, leaf = FLAG_PATHS[name]
        node = overrides
        for key in parents:
            node = node.setdefault(key, {})
        node[leaf] = value
    return overrides


def _value_list(ctx, param, value: Optional[str]) -> Optional[list[float]]:
    if value is None:
        return None
    try:
        values = parse_value_list(value)
    except ValueError as e:
        raise click.BadParameter(str(e)) from e
    if not values:
        raise click.BadParameter("empty value list")
    return values


def _predictor_name(ctx, param, value: Optional[str]) -> Optional[str]:
    if value is None:
        return None
    return resolve_predictor_name(value).value


def common_options(func):
    """Options every command accepts"""
    options = [
        click.option("--config", "config_path", type=click.Path(dir_okay=False),
                     help="JSON run configuration (a previous run_config.json works)"),
        click.option("--jobs", type=int, help="Samples/tiles processed concurrently"),
        click.option("--seed", type=int, help="Seed for the random prompt-sampling mode"),
        click.option("--format", "report_format", type=click.Choice(["csv", "json"]),
                     help="Report format"),
        click.option("--label-format", type=click.Choice(["lbl1", "pgm"]),
                     help="Format of written label images"),
        click.option("-v", "--verbose", is_flag=True, help="Report every finished item"),
    ]
    for option in reversed(options):
        func = option(func)
    return func


def ais_options(func):
    """Seeded-watershed parameters"""
    options = [
        click.option("--center-threshold", type=float, help="Seed threshold on the center distance"),
        click.option("--boundary-threshold", type=float, help="Seed threshold on the boundary distance"),
        click.option("--foreground-threshold", type=float, help="Foreground probability threshold"),
        click.option("--sigma", type=float, help="Gaussian smoothing sigma in pixels"),
        click.option("--min-size", type=float, help="Smallest instance kept, in pixels"),
    ]
    for option in reversed(options):
        func = option(func)
    return func


def predictor_options(func):
    options = [
        click.option("--predictor", callback=_predictor_name, help="oracle, regiongrow or file"),
        click.option("--region-grow-threshold", type=float, help="Guidance tolerance of the regiongrow predictor"),
    ]
    for option in reversed(options):
        func = option(func)
    return func


def run_command(command: str, params: dict[str, Any]) -> None:
    """Resolve the configuration, run the command and echo where its reports went"""
    config_path = params.pop("config_path", None)
    verbose = params.pop("verbose", False)
    config = resolve_run_config(command, build_overrides(params), config_path)
    logger.debug("Resolved configuration: %s", config.model_dump_json())

    orchestrator = Orchestrator(progress=ConsoleProgress(verbose=verbose))
    result = asyncio.run(orchestrator.run(config))

    if result.report.console_table:
        click.echo(result.report.console_table)
    for path in result.report.outputs + result.output.report_files:
        click.echo(f"  {path}")
    if result.failures:
        for failure in result.failures:
            click.echo(f"  ✗ {failure}", err=True)
        raise PartialFailureError(f"{len(result.failures)} item(s) failed", result.failures)


@click.group()
def cli():
    """Histoseg - segmentation algorithms and evaluation for histopathology"""
    logging.basicConfig(
        level=settings.LOG_LEVEL.upper(),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )


@cli.command()
@click.option("--gt", type=click.Path(dir_okay=False), help="Ground-truth label image")
@click.option("--out", type=click.Path(dir_okay=False), help="Prediction stack to write (PSF3)")
@common_options
def targets(**params):
    """Derive a prediction stack from a ground-truth labeling"""
    run_command("targets", params)


@cli.command()
@click.option("--stack", type=click.Path(dir_okay=False), help="Single prediction stack (PSF3)")
@click.option("--manifest", type=click.Path(dir_okay=False), help="Dataset manifest")
@click.option("--gt", type=click.Path(dir_okay=False), help="Ground truth for a single stack")
@click.option("--out", type=click.Path(), help="Label file (single stack) or directory (manifest)")
@click.option("--thresholds", callback=_value_list, help="IoU thresholds, 'a,b,c' or 'start:stop:step'")
@ais_options
@common_options
def segment(**params):
    """Automatic instance segmentation by seeded watershed"""
    run_command("segment", params)


@cli.command("grid-search")
@click.option("--manifest", type=click.Path(dir_okay=False), help="Dataset manifest")
@click.option("--out", type=click.Path(file_okay=False), help="Report directory")
@click.option("--grid", callback=_value_list, help="Threshold values for both axes")
@click.option("--boundary-grid", callback=_value_list, help="Boundary-axis values, if different")
@click.option("--iou-threshold", type=float, help="Matching IoU for precision/recall/F1")
@ais_options
@common_options
def grid_search(**params):
    """Sweep center and boundary thresholds"""
    if params.get("grid") is not None and params.get("boundary_grid") is None:
        params["boundary_grid"] = params["grid"]
    run_command("grid-search", params)


@cli.command()
@click.option("--manifest", type=click.Path(dir_okay=False), help="Dataset manifest")
@click.option("--pred", "pred_dir", type=click.Path(file_okay=False), help="Directory of predicted labelings")
@click.option("--out", type=click.Path(file_okay=False), help="Report directory")
@click.option("--thresholds", callback=_value_list, help="IoU thresholds, 'a,b,c' or 'start:stop:step'")
@click.option("--curve/--no-curve", default=None, help="Also emit precision/recall/F1 per threshold")
@common_options
def evaluate(**params):
    """Mean segmentation accuracy of predicted labelings"""
    run_command("evaluate", params)


@cli.command()
@click.option("--gt", type=click.Path(dir_okay=False), help="Ground truth (oracle predictor, scoring)")
@click.option("--guidance", type=click.Path(dir_okay=False), help="Guidance raster (regiongrow) or confidence map (file predictor)")
@click.option("--proposals", type=click.Path(dir_okay=False), help="Proposal labeling (file predictor)")
@click.option("--out", type=click.Path(dir_okay=False), help="Label file to write")
@click.option("--points-per-side", type=int, help="Grid points per side")
@click.option("--confidence-min", type=float, help="Lowest mask confidence kept")
@click.option("--dedup-iou", type=float, help="IoU at which a mask counts as duplicate")
@click.option("--min-area", type=int, help="Smallest mask kept, in pixels")
@click.option("--thresholds", callback=_value_list, help="IoU thresholds for scoring against --gt")
@predictor_options
@common_options
def amg(**params):
    """Automatic mask generation from a grid of point prompts"""
    run_command("amg", params)


@cli.command()
@click.option("--manifest", type=click.Path(dir_okay=False), help="Dataset manifest")
@click.option("--pred", "pred_dir", type=click.Path(file_okay=False), help="Proposal labelings (file predictor)")
@click.option("--out", type=click.Path(file_okay=False), help="Report directory")
@click.option("--start", type=click.Choice(["point", "box", "both"]), help="Initial prompt kinds")
@click.option("--iterations", type=int, help="Correction iterations after the initial prompt")
@click.option("--mask-prompt/--no-mask-prompt", default=None, help="Feed the previous mask back as a prompt")
@click.option("--sampling", type=click.Choice(["interior", "random"]), help="Prompt point selection")
@predictor_options
@common_options
def interactive(**params):
    """Simulated interactive segmentation with corrective clicks"""
    run_command("interactive", params)


@cli.command()
@click.option("--stack", type=click.Path(dir_okay=False), help="Slide prediction stack (PSF3)")
@click.option("--out", type=click.Path(dir_okay=False), help="Stitched label file")
@click.option("--tiled-output", type=click.Path(file_okay=False), help="Write per-tile labelings here instead")
@click.option("--tile", type=int, help="Tile edge in pixels")
@click.option("--halo", type=int, help="Halo width in pixels")
@click.option("--merge-iou", type=float, help="Strip IoU at which instances merge across tiles")
@ais_options
@common_options
def wsi(**params):
    """Tiled whole-slide segmentation with halo stitching"""
    run_command("wsi", params)


@cli.command("semantic-eval")
@click.option("--manifest", type=click.Path(dir_okay=False), help="Dataset manifest")
@click.option("--pred", "pred_dir", type=click.Path(file_okay=False), help="Directory of predicted class maps")
@click.option("--num-classes", type=int, help="Foreground classes C")
@click.option("--out", type=click.Path(file_okay=False), help="Report directory")
@common_options
def semantic_eval(**params):
    """Frequency-weighted dice of semantic predictions"""
    run_command("semantic-eval", params)


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Run the CLI and map failures onto exit codes 0/1/2/3"""
    args = list(sys.argv[1:] if argv is None else argv)
    try:
        rv = cli.main(args=args, prog_name="histoseg", standalone_mode=False)
        return rv if isinstance(rv, int) else 0
    except ConfigError as e:
        click.echo(f"Configuration error: {e}", err=True)
        return 1
    except click.exceptions.Abort:
        click.echo("Aborted", err=True)
        return 1
    except click.ClickException as e:
        e.show()
        return 1
    except PartialFailureError as e:
        click.echo(f"Partial failure: {e}", err=True)
        return 3
    except (HistosegError, OSError) as e:
        click.echo(f"Error: {e}", err=True)
        return 2


if __name__ == "__main__":
    sys.exit(main())
