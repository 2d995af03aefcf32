# =====================================
# This file is part of the CodeDev project
# Author: Ricel Quispe
# =====================================

# eplab/app/application/services/experiment_service.py

"""
Orchestration behind the command-line front end: turns validated requests
into computations and artifact bundles.
"""
import csv
import hashlib
import json
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel
from pydantic import ValidationError as PydanticValidationError

from app.application.interfaces.artifact_repository_interface import ArtifactRepositoryInterface
from app.application.services.ep_solver_service import (
    initial_state,
    poisson_force,
    predict_blowup_from_initial,
    run,
)
from app.application.services.lagrangian_service import (
    blowup_time_bounds,
    emit_portrait,
    integrate_majorant,
)
from app.application.services.threshold_service import (
    chae_tadmor_member,
    classify,
    rescale_physical,
)
from app.domain.entities.field import SimOutcome
from app.domain.entities.manifest import RunManifest
from app.domain.entities.phase import PhaseState, PhysicalParams, Verdict
from app.domain.entities.trajectory import IntegratorControls, PortraitDataset
from app.domain.exceptions import ConfigSchemaError, NumericalFailureError, VacuumStateError
from app.infrastructure.config import Settings
from app.presentation.schema.commands import (
    ClassifyRequest,
    IntegrateRequest,
    PortraitRequest,
    SimulationConfig,
    SweepRequest,
)

# Set up logging for the service
logger = logging.getLogger(__name__)

MANIFEST_NAME = "manifest.json"


def config_digest(command: str, request: BaseModel, seed: int) -> str:
    """sha256 of the canonical JSON of a request."""
    payload = {"command": command, "request": request.model_dump(mode="json"), "seed": seed}
    canonical = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def load_simulation_config(path: Path) -> SimulationConfig:
    """
    Reads and validates a simulation config.

    Raises:
        ConfigSchemaError: If the file cannot be read, is not JSON or does not
            match the schema.
    """
    try:
        document = json.loads(Path(path).read_text(encoding="utf-8"))
        return SimulationConfig.model_validate(document)
    except OSError as e:
        raise ConfigSchemaError(f"Cannot read config '{path}': {e}") from e
    except json.JSONDecodeError as e:
        raise ConfigSchemaError(f"Config '{path}' is not valid JSON: {e}") from e
    except PydanticValidationError as e:
        raise ConfigSchemaError(f"Config '{path}' does not match the schema: {e}") from e


def load_seeds(path: Path) -> List[PhaseState]:
    """Seeds from a CSV file with a `d,rho` header."""
    try:
        with open(path, newline="", encoding="utf-8") as handle:
            return [PhaseState(d=float(row["d"]), rho=float(row["rho"]))
                    for row in csv.DictReader(handle)]
    except OSError as e:
        raise ConfigSchemaError(f"Cannot read seeds file '{path}': {e}") from e
    except (KeyError, TypeError, ValueError) as e:
        raise ConfigSchemaError(f"Seeds file '{path}' needs numeric 'd,rho' columns: {e}") from e


def _simulate(config: SimulationConfig, poisson_tol: float, candidates: int):
    grid = config.grid()
    controls = config.controls()
    initial = initial_state(config.initial, grid)
    poisson_force(initial.rho, grid, tol=poisson_tol)
    prediction = predict_blowup_from_initial(initial, grid, controls, candidates=candidates)
    result = run(initial, grid, controls)
    return grid, initial, prediction, result


def _most_critical_verdict(prediction) -> str:
    margins = np.array([c.margin for c in prediction.classifications])
    return prediction.classifications[int(np.nanargmin(margins))].verdict.value


def _sweep_worker(payload: Dict[str, Any]) -> Dict[str, Any]:
    """Runs one sweep member; top-level so worker processes can import it."""
    config = SimulationConfig.model_validate(payload["config"])
    _, _, prediction, result = _simulate(config, payload["poisson_tol"], payload["candidates"])
    return {
        "param": payload["param"],
        "predicted_verdict": _most_critical_verdict(prediction),
        "observed_outcome": result.outcome.value,
        "t_pred": prediction.t_pred,
        "t_detect": result.t_detect,
        "failure": result.failure,
    }


class LabService:
    """
    A service class that runs the lab's experiments and persists their artifacts.

    This layer orchestrates computations and repository calls.
    """

    def __init__(self, repository: ArtifactRepositoryInterface, settings: Settings):
        """
        Initializes the service with a repository instance and the run settings.
        The repository is injected as a dependency.
        """
        self.repository = repository
        self.settings = settings

    def _commit(self, command: str, request: BaseModel) -> Tuple[RunManifest, List[Path]]:
        manifest = RunManifest(command=command,
                               config_digest=config_digest(command, request, self.settings.seed),
                               tool_version=self.settings.tool_version,
                               outputs=self.repository.staged_names())
        self.repository.add_json(MANIFEST_NAME, manifest.model_dump(mode="json"))
        paths = self.repository.commit()
        return manifest, paths

    def _integrator_controls(self, **overrides) -> IntegratorControls:
        values = dict(rel_tol=self.settings.rel_tol, abs_tol=self.settings.abs_tol,
                      max_time=self.settings.max_time, max_steps=self.settings.max_steps)
        values.update(overrides)
        return IntegratorControls(**values)

    # classify =========================================================================

    def classify(self, request: ClassifyRequest) -> Dict[str, Any]:
        """
        Classifies one state.

        Raises:
            VacuumStateError: If rho = 0.
            InvalidParametersError: If c <= 0 or k >= 0.
            DomainError: If rho < 0.
        """
        state = PhaseState(d=request.d, rho=request.rho)
        if request.is_physical:
            params = PhysicalParams(c=request.c if request.c is not None else 1.0,
                                    k=request.k if request.k is not None else -1.0)
            state = rescale_physical(state, params)

        classification = classify(state, request.n, request.tol)
        if classification.verdict == Verdict.INVALID_VACUUM:
            raise VacuumStateError("Cannot classify the vacuum state rho = 0.")

        result = {
            "verdict": classification.verdict.value,
            "I": classification.invariant_value,
            "margin": classification.margin,
            "chae_tadmor_member": chae_tadmor_member(state, request.n),
        }
        if classification.verdict.is_sup_critical:
            bounds = blowup_time_bounds(state, request.n, boundary_tol=request.tol)
            if math.isfinite(bounds.t_upper):
                result["t_upper"] = bounds.t_upper
        logger.info(f"Classified ({request.d}, {request.rho}), n={request.n}: {result['verdict']}.")
        return result

    # integrate ========================================================================

    def integrate(self, request: IntegrateRequest) -> Tuple[RunManifest, Dict[str, Any]]:
        state0 = PhaseState(d=request.d0, rho=request.rho0)
        controls = self._integrator_controls(rel_tol=request.tol, max_time=request.max_time)
        trajectory = integrate_majorant(state0, request.n, controls)
        bounds = blowup_time_bounds(state0, request.n, boundary_tol=self.settings.boundary_tol)
        classification = classify(state0, request.n, self.settings.boundary_tol)

        summary = {
            "n": request.n,
            "initial": {"d": request.d0, "rho": request.rho0},
            "verdict": classification.verdict.value,
            "event": trajectory.terminal_event.kind.value,
            "t_event": trajectory.terminal_event.t,
            "t_detect": trajectory.blowup_time,
            "bounds": {
                "case": bounds.case_kind.value,
                "t_upper": bounds.t_upper,
                "epsilon": bounds.epsilon_used,
                "note": bounds.note,
            },
            "invariant_drift": trajectory.invariant_drift,
            "final": {"d": trajectory.final_state.d, "rho": trajectory.final_state.rho},
            "steps": int(trajectory.times.size - 1),
        }

        self.repository.begin()
        self.repository.add_table(
            "trajectory.csv", ["t", "d", "rho", "I"],
            list(zip(trajectory.times, trajectory.d, trajectory.rho, trajectory.invariant)))
        self.repository.add_json("summary.json", summary)
        manifest, _ = self._commit("integrate", request)
        return manifest, summary

    # portrait =========================================================================

    def portrait_seeds(self, request: PortraitRequest) -> List[PhaseState]:
        seeds = load_seeds(request.seeds_file) if request.seeds_file else []
        if request.random_seeds:
            rng = np.random.default_rng(self.settings.seed)
            d = rng.uniform(-request.d_max, request.d_max, request.random_seeds)
            rho = request.rho_max * (1.0 - rng.random(request.random_seeds))
            seeds.extend(PhaseState(d=float(a), rho=float(b)) for a, b in zip(d, rho))
        if not seeds:
            half = min(0.5, request.rho_max / 2.0)
            seeds = [PhaseState(d=-1.0, rho=2.0 * half), PhaseState(d=0.0, rho=4.0 * half),
                     PhaseState(d=1.0, rho=half), PhaseState(d=-2.0, rho=half)]
        return seeds

    def portrait(self, request: PortraitRequest) -> Tuple[RunManifest, PortraitDataset]:
        seeds = self.portrait_seeds(request)
        controls = self._integrator_controls(rel_tol=1e-9, max_time=20.0)
        dataset = emit_portrait(request.n, (0.0, request.rho_max),
                                (-request.d_max, request.d_max), request.resolution,
                                seeds, controls, self.settings.boundary_tol)

        self.repository.begin()
        self.repository.add_table(
            "separatrix.csv", ["rho", "d_left", "d_right"],
            list(zip(dataset.separatrix_rho, dataset.separatrix_left, dataset.separatrix_right)))
        nullclines = []
        for curve, branch in (("d_prime_neg", dataset.nullcline_neg),
                              ("d_prime_pos", dataset.nullcline_pos)):
            nullclines.extend((curve, r, d) for r, d in zip(dataset.nullcline_rho, branch))
        nullclines.extend(("rho_prime", r, 0.0) for r in dataset.density_nullcline_rho)
        self.repository.add_table("nullclines.csv", ["curve", "rho", "d"], nullclines)
        rows = []
        for seed_id, trajectory in enumerate(dataset.trajectories):
            rows.extend((seed_id, t, d, r, i) for t, d, r, i in zip(
                trajectory.times, trajectory.d, trajectory.rho, trajectory.invariant))
        self.repository.add_table("trajectories.csv", ["seed_id", "t", "d", "rho", "I"], rows)
        self.repository.add_table(
            "grid.csv", ["d", "rho", "verdict"],
            list(zip(dataset.grid_d, dataset.grid_rho, dataset.grid_verdict)))
        self.repository.add_table(
            "points.csv", ["d", "rho", "kind"],
            [(p.location.d, p.location.rho, p.kind.value) for p in dataset.critical_points])
        self.repository.add_json("summary.json", {
            "n": dataset.n,
            "legacy_d": dataset.legacy_d,
            "seeds": [{"d": s.d, "rho": s.rho} for s in seeds],
            "events": [t.terminal_event.kind.value for t in dataset.trajectories],
        })
        manifest, _ = self._commit("portrait", request)
        return manifest, dataset

    # simulate =========================================================================

    def simulate(self, config: SimulationConfig) -> Tuple[RunManifest, Dict[str, Any]]:
        """
        Runs the 1D solver with its prediction.

        Raises:
            PoissonSolvabilityError: If the initial density does not have mean 1.
            NumericalFailureError: If the run fails; no files are written then.
        """
        grid, initial, prediction, result = _simulate(
            config, self.settings.poisson_tol, self.settings.prediction_candidates)
        if result.outcome == SimOutcome.NUMERICAL_FAILURE:
            raise NumericalFailureError(f"Simulation failed: {result.failure}")

        gap = None
        if prediction.t_pred is not None and result.t_detect is not None:
            gap = abs(result.t_detect - prediction.t_pred) / prediction.t_pred
        summary = {
            "outcome": result.outcome.value,
            "t_detect": result.t_detect,
            "t_pred": prediction.t_pred,
            "relative_gap": gap,
            "critical_cell": prediction.critical_cell,
            "steps": result.steps,
            "final_time": result.final_state.t,
            "final_max_rho": float(np.max(result.final_state.rho)),
        }

        self.repository.begin()
        self.repository.add_table(
            "sim_history.csv", ["t", "max_rho", "min_ux"],
            [(t, r, u) for (t, r), (_, u) in zip(result.max_rho_history, result.min_ux_history)])
        for snapshot in (initial, result.final_state):
            name = f"fields_t{snapshot.t:.6f}.csv"
            if name not in self.repository.staged_names():
                self.repository.add_table(name, ["x", "rho", "u"],
                                          list(zip(grid.x, snapshot.rho, snapshot.u)))
        self.repository.add_table(
            "prediction.csv", ["x", "d0", "rho0", "verdict", "t_ode"],
            [(x, d, r, c.verdict.value, t) for x, d, r, c, t in zip(
                prediction.x, prediction.d0, prediction.rho0,
                prediction.classifications, prediction.t_ode)])
        self.repository.add_json("summary.json", summary)
        manifest, _ = self._commit("simulate", config)
        return manifest, summary

    # sweep ============================================================================

    def sweep(self, request: SweepRequest) -> Tuple[RunManifest, List[Dict[str, Any]]]:
        """
        Runs one simulation per amplitude and writes one row per run.

        Raises:
            NumericalFailureError: If any run fails; no files are written then.
        """
        params = np.linspace(request.start, request.stop, request.steps) if request.steps else []
        payloads = []
        for param in params:
            initial = request.config.initial.model_copy(
                update={"kind": request.family, "amplitude": float(param)})
            config = request.config.model_copy(update={"initial": initial})
            payloads.append({"param": float(param), "config": config.model_dump(mode="json"),
                             "poisson_tol": self.settings.poisson_tol,
                             "candidates": self.settings.prediction_candidates})

        logger.info(f"Sweep over {request.family}: {len(payloads)} run(s), "
                    f"{self.settings.threads} worker(s).")
        if self.settings.threads > 1 and len(payloads) > 1:
            with ProcessPoolExecutor(max_workers=self.settings.threads) as pool:
                rows = list(pool.map(_sweep_worker, payloads))
        else:
            rows = [_sweep_worker(p) for p in payloads]

        for row in rows:
            if row["observed_outcome"] == SimOutcome.NUMERICAL_FAILURE.value:
                raise NumericalFailureError(
                    f"Sweep run at {request.family}={row['param']!r} failed: {row['failure']}")

        self.repository.begin()
        header = ["param", "predicted_verdict", "observed_outcome", "t_pred", "t_detect"]
        self.repository.add_table("sweep.csv", header, [[row[h] for h in header] for row in rows])
        manifest, _ = self._commit("sweep", request)
        return manifest, rows
