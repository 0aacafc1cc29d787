"""Monte Carlo experiment runner: config loading, execution and CSV output."""

from __future__ import annotations

import csv
import hashlib
import os
import re
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields, replace
from importlib import resources
from pathlib import Path

import numpy as np
import yaml

from .geometry import CameraExtrinsics
from .perception import RoiLimits
from .ransac import RansacParams
from .scene import PoseMode, SceneConfig, save_cloud
from .task import FailureCause, FeedbackMethod, TaskSettings, Tolerances, run_trial

CSV_HEADER = ["mode", "method", "trials", "successes", "success_rate", "top_failure_cause"]
MODE_ORDER = [PoseMode.CONSTANT, PoseMode.RANDOM]
METHOD_ORDER = list(FeedbackMethod)
SEED_ENV = "GRASPSIM_SEED"


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class ExperimentConfig:
    scene: SceneConfig = field(default_factory=SceneConfig)
    tolerances: Tolerances = field(default_factory=Tolerances)
    settings: TaskSettings = field(default_factory=TaskSettings)
    methods: tuple = tuple(METHOD_ORDER)
    modes: tuple = tuple(MODE_ORDER)
    trials_per_cell: int = 10
    master_seed: int = 0
    output: str | None = None
    dump_clouds: str | None = None

    def __post_init__(self):
        if not isinstance(self.trials_per_cell, int) or self.trials_per_cell < 1:
            raise ConfigError(f"experiment.trials_per_cell: must be an integer >= 1, got {self.trials_per_cell!r}")
        if not self.methods:
            raise ConfigError("experiment.methods: must not be empty")
        if not self.modes:
            raise ConfigError("experiment.modes: must not be empty")
        if not isinstance(self.master_seed, int) or not 0 <= self.master_seed < 2**64:
            raise ConfigError(f"experiment.master_seed: must be a 64-bit unsigned integer, got {self.master_seed!r}")


@dataclass
class CellResult:
    trials: int = 0
    successes: int = 0
    causes: Counter = field(default_factory=Counter)

    @property
    def success_rate(self) -> float:
        return self.successes / self.trials if self.trials else 0.0

    def add(self, outcome) -> None:
        self.trials += 1
        self.successes += int(outcome.success)
        self.causes[outcome.failure_cause] += 1

    def merge(self, other: "CellResult") -> "CellResult":
        return CellResult(self.trials + other.trials, self.successes + other.successes,
                          self.causes + other.causes)

    def top_failure_cause(self) -> FailureCause:
        failures = {c: n for c, n in self.causes.items() if c is not FailureCause.NONE and n > 0}
        if not failures:
            return FailureCause.NONE
        order = list(FailureCause)
        return max(failures, key=lambda c: (failures[c], -order.index(c)))


@dataclass
class ResultsTable:
    cells: dict = field(default_factory=dict)  # (PoseMode, FeedbackMethod) -> CellResult

    def rate(self, mode: PoseMode, method: FeedbackMethod) -> float:
        return self.cells[(mode, method)].success_rate

    def merge(self, other: "ResultsTable") -> "ResultsTable":
        out = dict(self.cells)
        for key, cell in other.cells.items():
            out[key] = out[key].merge(cell) if key in out else cell
        return ResultsTable(out)

    def rows(self):
        for mode in MODE_ORDER:
            for method in METHOD_ORDER:
                if (mode, method) in self.cells:
                    yield mode, method, self.cells[(mode, method)]


def trial_seed(master_seed: int, mode: PoseMode, method: FeedbackMethod, index: int) -> int:
    key = f"{master_seed}|{mode.value}|{method.value}|{index}".encode()
    return int.from_bytes(hashlib.blake2b(key, digest_size=8).digest(), "little")


def _run_cell(config: ExperimentConfig, mode: PoseMode, method: FeedbackMethod) -> CellResult:
    cell = CellResult()
    for i in range(config.trials_per_cell):
        scene = replace(config.scene, seed=trial_seed(config.master_seed, mode, method, i))
        sink = None
        if config.dump_clouds:
            stem = Path(config.dump_clouds) / f"{mode.value}_{method.value}_{i:03d}"

            def sink(tag, cloud, stem=stem):
                save_cloud(f"{stem}_{tag}.xyz", cloud, "camera")
        cell.add(run_trial(method, mode, scene, config.tolerances, i, config.settings, sink))
    return cell


def run_experiment(config: ExperimentConfig, workers: int = 1) -> ResultsTable:
    """Run every (mode, method) cell; the result does not depend on ``workers``."""
    if config.dump_clouds:
        Path(config.dump_clouds).mkdir(parents=True, exist_ok=True)
    keys = [(mode, method) for mode in config.modes for method in config.methods]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = {k: pool.submit(_run_cell, config, *k) for k in keys}
            cells = {k: f.result() for k, f in futures.items()}
    else:
        cells = {k: _run_cell(config, *k) for k in keys}
    return ResultsTable(cells)


def emit_results(table: ResultsTable, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for mode, method, cell in table.rows():
            writer.writerow([mode.value, method.value, cell.trials, cell.successes,
                             f"{cell.success_rate:.2f}", cell.top_failure_cause().value])


# --- config parsing ---------------------------------------------------------

_METHOD_ALIASES = {
    "nofeedback": FeedbackMethod.NO_FEEDBACK, "none": FeedbackMethod.NO_FEEDBACK,
    "tactile": FeedbackMethod.TACTILE_ONLY, "tactileonly": FeedbackMethod.TACTILE_ONLY,
    "visual": FeedbackMethod.VISUAL_ONLY, "visualonly": FeedbackMethod.VISUAL_ONLY,
    "tactilevisual": FeedbackMethod.TACTILE_VISUAL, "visualtactile": FeedbackMethod.TACTILE_VISUAL,
}


def parse_method(name: str) -> FeedbackMethod:
    key = re.sub(r"[^a-z]", "", str(name).lower())
    if key not in _METHOD_ALIASES:
        raise ConfigError(f"unknown method {name!r}; expected one of {[m.value for m in METHOD_ORDER]}")
    return _METHOD_ALIASES[key]


def parse_mode(name: str) -> PoseMode:
    key = str(name).strip().lower()
    for mode in PoseMode:
        if mode.value.lower() == key:
            return mode
    raise ConfigError(f"unknown mode {name!r}; expected constant or random")


def _section(raw: dict, name: str) -> dict:
    sec = raw.get(name) or {}
    if not isinstance(sec, dict):
        raise ConfigError(f"{name}: must be a mapping")
    return dict(sec)


def _build(cls, section: str, values: dict, **extra):
    known = {f.name for f in fields(cls)}
    unknown = sorted(set(values) - known)
    if unknown:
        raise ConfigError(f"{section}.{unknown[0]}: unknown key")
    for k, v in values.items():
        if isinstance(v, list):
            values[k] = tuple(v)
    try:
        return cls(**values, **extra)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{section}: {exc}") from exc


def _pop_deg(values: dict, key: str, section: str):
    deg_key = f"{key}_deg"
    if deg_key in values:
        if key in values:
            raise ConfigError(f"{section}.{key}: give either {key} or {deg_key}, not both")
        v = values.pop(deg_key)
        try:
            values[key] = float(np.radians(float(v)))
        except (TypeError, ValueError):
            raise ConfigError(f"{section}.{deg_key}: must be a number, got {v!r}") from None


def config_from_dict(raw: dict) -> ExperimentConfig:
    if not isinstance(raw, dict):
        raise ConfigError("config root must be a mapping")
    unknown = sorted(set(raw) - {"experiment", "scene", "camera", "tolerances", "task", "ransac", "roi"})
    if unknown:
        raise ConfigError(f"{unknown[0]}: unknown section")

    cam = _section(raw, "camera")
    for key in ("tilt", "pan"):
        _pop_deg(cam, key, "camera")
    camera = _build(CameraExtrinsics, "camera", cam)
    scene = _build(SceneConfig, "scene", _section(raw, "scene"), camera=camera)

    tol = _section(raw, "tolerances")
    _pop_deg(tol, "align_tolerance", "tolerances")
    tolerances = _build(Tolerances, "tolerances", tol)

    roi = _build(RoiLimits, "roi", _section(raw, "roi"))
    ransac = _build(RansacParams, "ransac", _section(raw, "ransac"))
    settings = _build(TaskSettings, "task", _section(raw, "task"), roi=roi, ransac=ransac)

    exp = _section(raw, "experiment")
    try:
        methods = tuple(parse_method(m) for m in exp.pop("methods", [m.value for m in METHOD_ORDER]))
        modes = tuple(parse_mode(m) for m in exp.pop("modes", [m.value for m in MODE_ORDER]))
    except ConfigError as exc:
        raise ConfigError(f"experiment: {exc}") from None
    return _build(ExperimentConfig, "experiment", exp, scene=scene, tolerances=tolerances,
                  settings=settings, methods=methods, modes=modes)


def shipped_configs() -> list[str]:
    return sorted(p.name[:-5] for p in resources.files("graspsim.configs").iterdir()
                  if p.name.endswith(".yaml"))


def load_config(path_or_name) -> ExperimentConfig:
    """Load a YAML config from a path, or by name from the shipped configs."""
    path = Path(path_or_name)
    if path.is_file():
        text = path.read_text()
    elif str(path_or_name) in shipped_configs():
        text = resources.files("graspsim.configs").joinpath(f"{path_or_name}.yaml").read_text()
    else:
        raise ConfigError(f"config {path_or_name!r} not found (shipped: {', '.join(shipped_configs())})")
    try:
        raw = yaml.safe_load(text) or {}
    except yaml.YAMLError as exc:
        raise ConfigError(f"config {path_or_name!r} is not valid YAML: {exc}") from None
    return config_from_dict(raw)


def seed_from_env(config: ExperimentConfig) -> ExperimentConfig:
    value = os.environ.get(SEED_ENV)
    if value is None or value == "":
        return config
    try:
        seed = int(value, 0)
    except ValueError:
        raise ConfigError(f"{SEED_ENV}: must be an integer, got {value!r}") from None
    return replace(config, master_seed=seed)
