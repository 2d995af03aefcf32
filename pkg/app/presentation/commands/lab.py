# =====================================
# This file is part of the CodeDev project
# Author: Ricel Quispe
# =====================================

# eplab/app/presentation/commands/lab.py

"""
Command-line endpoints of the lab.
"""
import argparse
import json
from pathlib import Path
from typing import Type, TypeVar

from pydantic import BaseModel
from pydantic import ValidationError as PydanticValidationError

from app.application.services.experiment_service import load_simulation_config
from app.domain.exceptions import InvalidParametersError
from app.infrastructure.repositories.csv_artifact_repository import to_jsonable
from app.presentation.dependencies import get_lab_service, get_settings
from app.presentation.handlers.exceptions import EXIT_OK
from app.presentation.router import CommandRouter, arg
from app.presentation.schema.commands import (
    ClassifyRequest,
    IntegrateRequest,
    PortraitRequest,
    SweepRequest,
)

router = CommandRouter()

Request = TypeVar("Request", bound=BaseModel)


def _request(model: Type[Request], **fields) -> Request:
    try:
        return model(**{k: v for k, v in fields.items() if v is not None})
    except PydanticValidationError as e:
        raise InvalidParametersError(f"Invalid arguments: {e}") from e


def _service(args: argparse.Namespace):
    return get_lab_service(get_settings(args.out_dir, args.seed, args.threads))


def _print_json(document) -> None:
    print(json.dumps(to_jsonable(document), sort_keys=True))


@router.command(
    "classify",
    help="Classify one (d, rho) state; prints a JSON verdict.",
    arguments=[
        arg("--d", type=float, required=True),
        arg("--rho", type=float, required=True),
        arg("--n", type=int, required=True),
        arg("--c", type=float, help="Background density (physical units)."),
        arg("--k", type=float, help="Forcing constant, must be negative."),
        arg("--tol", type=float, help="Boundary tolerance in the margin metric."),
    ],
)
def classify_command(args: argparse.Namespace) -> int:
    """
    Classifies one state. Exceptions are handled by centralized handlers.
    """
    request = _request(ClassifyRequest, d=args.d, rho=args.rho, n=args.n,
                       c=args.c, k=args.k, tol=args.tol)
    _print_json(_service(args).classify(request))
    return EXIT_OK


@router.command(
    "integrate",
    help="Integrate the majorant system from (d0, rho0).",
    arguments=[
        arg("--d0", type=float, required=True),
        arg("--rho0", type=float, required=True),
        arg("--n", type=int, required=True),
        arg("--tol", type=float, help="Relative tolerance."),
        arg("--max-time", dest="max_time", type=float),
    ],
)
def integrate_command(args: argparse.Namespace) -> int:
    request = _request(IntegrateRequest, d0=args.d0, rho0=args.rho0, n=args.n,
                       tol=args.tol, max_time=args.max_time)
    manifest, _ = _service(args).integrate(request)
    _print_json(manifest.model_dump(mode="json"))
    return EXIT_OK


@router.command(
    "portrait",
    help="Emit the phase-portrait CSV bundle.",
    arguments=[
        arg("--n", type=int),
        arg("--rho-max", dest="rho_max", type=float),
        arg("--d-max", dest="d_max", type=float),
        arg("--resolution", type=int),
        arg("--seeds-file", dest="seeds_file", type=Path, help="CSV with a d,rho header."),
        arg("--random-seeds", dest="random_seeds", type=int,
            help="Number of random seeds drawn with --seed."),
    ],
)
def portrait_command(args: argparse.Namespace) -> int:
    request = _request(PortraitRequest, n=args.n, rho_max=args.rho_max, d_max=args.d_max,
                       resolution=args.resolution, seeds_file=args.seeds_file,
                       random_seeds=args.random_seeds)
    manifest, _ = _service(args).portrait(request)
    _print_json(manifest.model_dump(mode="json"))
    return EXIT_OK


@router.command(
    "simulate",
    help="Run the periodic 1D solver from a JSON config.",
    arguments=[arg("config", type=Path, help="Path to the simulation config (JSON).")],
)
def simulate_command(args: argparse.Namespace) -> int:
    config = load_simulation_config(args.config)
    manifest, summary = _service(args).simulate(config)
    _print_json({"manifest": manifest.model_dump(mode="json"), "summary": summary})
    return EXIT_OK


@router.command(
    "sweep",
    help="Sweep the amplitude of an initial-data family.",
    arguments=[
        arg("--family", required=True,
            choices=["density_cosine", "velocity_sine", "separatrix"]),
        arg("--start", type=float, required=True),
        arg("--stop", type=float, required=True),
        arg("--steps", type=int, required=True),
        arg("--config", type=Path, help="Base simulation config (JSON)."),
    ],
)
def sweep_command(args: argparse.Namespace) -> int:
    fields = dict(family=args.family, start=args.start, stop=args.stop, steps=args.steps)
    if args.config is not None:
        fields["config"] = load_simulation_config(args.config)
    request = _request(SweepRequest, **fields)
    manifest, _ = _service(args).sweep(request)
    _print_json(manifest.model_dump(mode="json"))
    return EXIT_OK
