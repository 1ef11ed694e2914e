# Copyright 2025 Juspay
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at https://www.apache.org/licenses/LICENSE-2.0.txt

import json
import logging
import sys
from pathlib import Path
from typing import Optional

import click
import dotenv

dotenv.load_dotenv()

from charlab import config as runtime_config
from charlab.api_schema.config import read_config_file
from charlab.errors import EXIT_ASSERTION, EXIT_OK, EXIT_USAGE, CharLabError, exit_code_for
from charlab.group.abelian import parse_group
from charlab.tools import command_description, handle_command

logger = logging.getLogger(__name__)


def _configure_logging():
    logging.basicConfig(
        level=getattr(logging, runtime_config.load().log_level, logging.INFO),
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        stream=sys.stderr,
    )


def _parse_alphas(ctx, param, value):
    if value is None:
        return None
    try:
        return json.loads(value)
    except json.JSONDecodeError as e:
        raise click.BadParameter(f"not valid JSON: {e.msg}") from e


def _parse_marginals(ctx, param, value):
    parsed = _parse_alphas(ctx, param, value)
    if parsed is not None and not isinstance(parsed, list):
        raise click.BadParameter("expected a JSON list of probability lists")
    return parsed


def _merged_config(config: Optional[str], group: Optional[str], alphas, mode: Optional[str] = None,
                   seed: Optional[int] = None, restarts: Optional[int] = None,
                   tol: Optional[float] = None) -> dict:
    """Config file first, then flags on top."""
    merged = read_config_file(config) if config else {}
    if group is not None:
        merged["group"] = {"moduli": list(parse_group(group).moduli)}
    if alphas is not None:
        merged["alphas"] = alphas
    if mode is not None:
        merged["mode"] = mode
    if seed is not None or restarts is not None:
        seeds = dict(merged.get("seeds") or {})
        if seed is not None:
            seeds["master"] = seed
        if restarts is not None:
            seeds["restarts"] = restarts
        merged["seeds"] = seeds
    if tol is not None:
        merged["tolerances"] = {**(merged.get("tolerances") or {}), "membership": tol}
    return merged


def _system_arguments(merged: dict) -> dict:
    group = merged.get("group")
    moduli = group.get("moduli") if isinstance(group, dict) else None
    return {"moduli": moduli, "alphas": merged.get("alphas")}


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        Path(out).write_text(text if text.endswith("\n") else text + "\n", encoding="utf-8")
    else:
        click.echo(text, nl=not text.endswith("\n"))


def _dispatch(name: str, arguments: dict) -> int:
    result = handle_command(name, arguments)
    _emit(result.render(arguments.get("format") or "json"), arguments.get("out"))
    return result.exit_code


group_option = click.option("--group", help="Group literal, e.g. Z5 or Z2xZ4.")
alphas_option = click.option("--alphas", callback=_parse_alphas, help="Coefficient grid as inline JSON.")
config_option = click.option("--config", type=click.Path(dir_okay=False), help="JSON config file.")
out_option = click.option("--out", type=click.Path(dir_okay=False), help="Write the result here.")
format_option = click.option("--format", "fmt", type=click.Choice(["json", "csv"]), default="json", show_default=True)


@click.group(context_settings={"help_option_names": ["-h", "--help"]})
def cli():
    """Finite-group lab for the characterization of laws by linear forms."""


@cli.command("check-conditions", help=command_description("check-conditions"))
@group_option
@alphas_option
@config_option
@out_option
@format_option
def check_conditions(group, alphas, config, out, fmt):
    merged = _merged_config(config, group, alphas)
    return _dispatch("check-conditions", {**_system_arguments(merged), "out": out, "format": fmt})


@cli.command("test-dmk", help=command_description("test-dmk"))
@group_option
@alphas_option
@config_option
@click.option("--marginals", callback=_parse_marginals, help="JSON list of probability lists, one per variable.")
@click.option("--k", "k", type=int, help="Test D_{m,k}; defaults to m-1.")
@click.option("--seed", type=int, default=0, show_default=True, help="Seed for sampled marginals.")
@click.option("--tol", type=float, help="Membership tolerance.")
@out_option
@format_option
def dmk_command(group, alphas, config, marginals, k, seed, tol, out, fmt):
    merged = _merged_config(config, group, alphas)
    arguments = {**_system_arguments(merged), "marginals": marginals, "k": k, "seed": seed,
                 "tol": tol, "out": out, "format": fmt}
    if "floor" in merged:
        arguments["floor"] = merged["floor"]
    return _dispatch("test-dmk", arguments)


def _experiment_command(name: str, with_mode: bool):
    def command(group, alphas, config, seed, restarts, tol, out, fmt, mode=None):
        merged = _merged_config(config, group, alphas, mode, seed, restarts, tol)
        return _dispatch(name, {"config": merged, "out": out, "format": fmt})

    params = [
        group_option, alphas_option, config_option,
        click.option("--seed", type=int, help="Master seed."),
        click.option("--restarts", type=int, help="Number of restarts."),
        click.option("--tol", type=float, help="Membership tolerance."),
        out_option, format_option,
    ]
    if with_mode:
        params.append(click.option(
            "--mode", type=click.Choice(["theorem1", "theorem3", "theorem4", "theorem5"]),
            help="Experiment; defaults to the config's mode, then theorem1.",
        ))
    for param in reversed(params):
        command = param(command)
    return command


cli.command("verify", help=command_description("verify"))(
    _experiment_command("verify", with_mode=True)
)
cli.command("explore", help=command_description("explore"))(
    _experiment_command("explore", with_mode=False)
)


@cli.command("catalog", help=command_description("catalog"))
@click.option("--max-order", type=int, default=16, show_default=True)
@out_option
@format_option
def catalog(max_order, out, fmt):
    return _dispatch("catalog", {"max_order": max_order, "out": out, "format": fmt})


def run(argv: Optional[list] = None) -> int:
    """Run the CLI and return its exit code; never raises."""
    _configure_logging()
    try:
        code = cli.main(args=argv, prog_name="lca-charlab", standalone_mode=False)
    except click.ClickException as e:
        e.show()
        return EXIT_USAGE
    except click.exceptions.Abort:
        return EXIT_USAGE
    except CharLabError as e:
        click.echo(json.dumps(e.to_json()), err=True)
        return exit_code_for(e)
    except Exception:
        logger.exception("Unexpected failure")
        return EXIT_ASSERTION
    return code if isinstance(code, int) else EXIT_OK


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
