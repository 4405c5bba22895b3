"""
Configuração de uma execução (RunConfig), lida de TOML.

Layout:

    schema_version = 1
    task = "cliffwalking"
    method = "storl"
    seed = 0

    [dataset]   n_trajectories, expert_prob, seed
    [shaping]   gamma, horizon
    [iql]       expectile, beta, learning_rate, batch_size, target_rate, iterations, max_weight
    [network]   hidden, activation
    [planner]   mode, fixture, base_url, model, api_key_env, retries, timeout, temperature, strict
    [train]     eval_every, curve_episodes, log_every, resume
    [eval]      episodes, seed
    [verify]    gamma, horizon, samples, pairs, seed, max_k
    [paths]     root, schedule, dataset, shaped, checkpoint, curve, report, ...

Every section is optional; shaping.gamma/horizon and dataset.expert_prob default per task.
"""
from __future__ import annotations

import hashlib
import json
import logging
import tomllib
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path

from django.conf import settings

from gridworlds.services.tasks import MAZE_TASKS, TASK_IDS, get_spec, make_environment
from learner.services.iql import IQLHyper
from learner.services.network import NetworkSpec
from learner.services.state import METHODS, STORL
from planner.services.client import EndpointConfig
from shaping.services.potential import ShapingParams

from .exceptions import ConfigError

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1
GRID_EXPERT_PROB = 0.5
MAZE_EXPERT_PROB = 0.3


@dataclass(frozen=True)
class DatasetConfig:
    n_trajectories: int = 1000
    expert_prob: float | None = None
    seed: int = 0

    def __post_init__(self):
        if self.n_trajectories < 1:
            raise ConfigError(f"dataset.n_trajectories deve ser >= 1: {self.n_trajectories}")
        if self.expert_prob is not None and not 0.0 <= self.expert_prob <= 1.0:
            raise ConfigError(f"dataset.expert_prob deve estar em [0, 1]: {self.expert_prob}")


@dataclass(frozen=True)
class PlannerConfig:
    mode: str | None = None
    fixture: str | None = None
    base_url: str | None = None
    model: str | None = None
    api_key_env: str | None = None
    retries: int | None = None
    timeout: float | None = None
    temperature: float = 0.0
    strict: bool = False

    def endpoint(self) -> EndpointConfig:
        """Settings give the defaults; keys set here win."""
        overrides = {f.name: getattr(self, f.name) for f in fields(self) if f.name != "strict"}
        return EndpointConfig.from_settings(**overrides)


@dataclass(frozen=True)
class TrainConfig:
    eval_every: int = 10
    curve_episodes: int = 10
    log_every: int = 100
    resume: bool = False

    def __post_init__(self):
        if self.eval_every < 1 or self.log_every < 1:
            raise ConfigError("train.eval_every e train.log_every devem ser >= 1")
        if self.curve_episodes < 0:
            raise ConfigError("train.curve_episodes não pode ser negativo")


@dataclass(frozen=True)
class EvalConfig:
    episodes: int = 100
    seed: int = 0

    def __post_init__(self):
        if self.episodes < 1:
            raise ConfigError(f"eval.episodes deve ser >= 1: {self.episodes}")


@dataclass(frozen=True)
class VerifyConfig:
    gamma: float = 0.999
    horizon: int = 100
    samples: int = 100_000
    pairs: int = 1_000
    seed: int = 0
    max_k: int = 8

    def __post_init__(self):
        if self.samples < 1 or self.pairs < 1:
            raise ConfigError("verify.samples e verify.pairs devem ser >= 1")
        if self.max_k < 2:
            raise ConfigError("verify.max_k deve ser >= 2")

    @property
    def params(self) -> ShapingParams:
        return ShapingParams(self.gamma, self.horizon)


@dataclass(frozen=True)
class PathsConfig:
    root: str = ""
    schedule: str = ""
    dataset: str = ""
    shaped: str = ""
    checkpoint: str = ""
    curve: str = ""
    report: str = ""
    stats: str = ""
    value_map: str = ""
    verify: str = ""
    ablation: str = ""


@dataclass(frozen=True)
class RunConfig:
    task: str
    method: str = STORL
    seed: int = 0
    dataset: DatasetConfig = field(default_factory=DatasetConfig)
    shaping: ShapingParams | None = None
    iql: IQLHyper = field(default_factory=IQLHyper)
    network: NetworkSpec = field(default_factory=NetworkSpec)
    planner: PlannerConfig = field(default_factory=PlannerConfig)
    train: TrainConfig = field(default_factory=TrainConfig)
    eval: EvalConfig = field(default_factory=EvalConfig)
    verify: VerifyConfig = field(default_factory=VerifyConfig)
    paths: PathsConfig = field(default_factory=PathsConfig)

    def __post_init__(self):
        if self.task not in TASK_IDS:
            raise ConfigError(f"task desconhecida: {self.task!r} (opções: {', '.join(TASK_IDS)})")
        if self.method not in METHODS:
            raise ConfigError(f"method desconhecido: {self.method!r} (opções: {', '.join(METHODS)})")
        if self.shaping is None:
            spec = get_spec(self.task)
            object.__setattr__(self, "shaping", ShapingParams(spec.gamma, spec.horizon))
        if self.dataset.expert_prob is None:
            default = MAZE_EXPERT_PROB if self.task in MAZE_TASKS else GRID_EXPERT_PROB
            object.__setattr__(self, "dataset", replace(self.dataset, expert_prob=default))

    @property
    def discrete(self) -> bool:
        return self.task not in MAZE_TASKS

    def environment(self):
        return make_environment(self.task, gamma=self.shaping.gamma, horizon=self.shaping.horizon)

    def as_dict(self) -> dict:
        return asdict(self)

    @property
    def digest(self) -> str:
        blob = json.dumps(self.as_dict(), sort_keys=True, default=str).encode()
        return hashlib.sha256(blob).hexdigest()[:16]

    @property
    def dataset_digest(self) -> str:
        """Only what the generated dataset depends on."""
        blob = json.dumps(
            {"task": self.task, "dataset": asdict(self.dataset), "horizon": self.shaping.horizon},
            sort_keys=True,
        ).encode()
        return hashlib.sha256(blob).hexdigest()[:16]

    # Artefactos
    @property
    def root(self) -> Path:
        base = Path(self.paths.root) if self.paths.root else Path(settings.STORL_ARTIFACT_DIR)
        return base / self.task

    def _path(self, key: str, default: str) -> Path:
        value = getattr(self.paths, key)
        return Path(value) if value else self.root / default

    @property
    def run_name(self) -> str:
        return f"{self.method}-seed{self.seed}"

    def schedule_path(self) -> Path:
        return self._path("schedule", "schedule.json")

    def dataset_path(self) -> Path:
        return self._path("dataset", f"dataset-seed{self.dataset.seed}.jsonl")

    def shaped_path(self) -> Path:
        return self._path("shaped", f"shaped-seed{self.dataset.seed}.jsonl")

    def checkpoint_path(self) -> Path:
        return self._path("checkpoint", f"{self.run_name}.ckpt")

    def curve_path(self) -> Path:
        return self._path("curve", f"{self.run_name}-curve.csv")

    def report_path(self) -> Path:
        return self._path("report", f"{self.run_name}-report.csv")

    def stats_path(self) -> Path:
        return self._path("stats", f"dataset-seed{self.dataset.seed}-stats.json")

    def value_map_path(self) -> Path:
        return self._path("value_map", f"{self.run_name}-values.csv")

    def verify_path(self) -> Path:
        return self._path("verify", "verify.json")

    def ablation_path(self) -> Path:
        return self._path("ablation", f"ablation-seed{self.seed}.csv")


_SECTIONS = {
    "dataset": DatasetConfig,
    "shaping": ShapingParams,
    "iql": IQLHyper,
    "network": NetworkSpec,
    "planner": PlannerConfig,
    "train": TrainConfig,
    "eval": EvalConfig,
    "verify": VerifyConfig,
    "paths": PathsConfig,
}
_TOP_LEVEL = {"schema_version", "task", "method", "seed"}


def _section(name: str, values) -> object:
    cls = _SECTIONS[name]
    if not isinstance(values, dict):
        raise ConfigError(f"[{name}] deve ser uma tabela")
    allowed = {f.name for f in fields(cls)}
    if name == "shaping":
        allowed.discard("schedule_digest")
    unknown = sorted(set(values) - allowed)
    if unknown:
        raise ConfigError(f"Chaves desconhecidas em [{name}]: {', '.join(unknown)}")
    values = dict(values)
    if name == "network" and "hidden" in values:
        values["hidden"] = tuple(values["hidden"])
    if name == "shaping":
        missing = {"gamma", "horizon"} - set(values)
        if missing:
            return values
    try:
        return cls(**values)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"[{name}] inválida: {exc}") from exc


def parse_value(text: str):
    """A TOML literal when it parses as one, the raw string otherwise."""
    try:
        return tomllib.loads(f"value = {text}")["value"]
    except tomllib.TOMLDecodeError:
        return text


def apply_overrides(document: dict, overrides: list[str]) -> dict:
    """Apply `section.key=value` (or `key=value` for top-level keys) on top of a raw document."""
    document = {k: dict(v) if isinstance(v, dict) else v for k, v in document.items()}
    for item in overrides:
        key, sep, raw = item.partition("=")
        if not sep or not key.strip():
            raise ConfigError(f"Override inválido (esperado secção.chave=valor): {item!r}")
        section, dot, name = key.strip().partition(".")
        if not dot:
            document[section] = parse_value(raw.strip())
            continue
        if section not in _SECTIONS:
            raise ConfigError(f"Secção desconhecida no override: [{section}]")
        document.setdefault(section, {})[name] = parse_value(raw.strip())
    return document


def config_from_document(document: dict) -> RunConfig:
    version = document.get("schema_version", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        raise ConfigError(f"schema_version {version!r} não suportada (esperado {SCHEMA_VERSION})")
    unknown = sorted(set(document) - _TOP_LEVEL - set(_SECTIONS))
    if unknown:
        raise ConfigError(f"Chaves desconhecidas: {', '.join(unknown)}")
    if "task" not in document:
        raise ConfigError("Falta a chave 'task'")

    sections = {name: _section(name, document[name]) for name in _SECTIONS if name in document}
    shaping = sections.pop("shaping", None)
    if isinstance(shaping, dict):
        # partial [shaping]: fill what is missing from the task defaults
        spec = get_spec(document["task"]) if document["task"] in TASK_IDS else None
        if spec is None:
            raise ConfigError(f"task desconhecida: {document['task']!r}")
        shaping = ShapingParams(shaping.get("gamma", spec.gamma), shaping.get("horizon", spec.horizon))

    config = RunConfig(
        task=document["task"],
        method=document.get("method", STORL),
        seed=document.get("seed", 0),
        shaping=shaping,
        **sections,
    )
    config.shaping.warn_if_boundary()
    return config


def load_config(path: str | Path | None = None, overrides: list[str] | None = None, **flags) -> RunConfig:
    """Read a RunConfig from TOML, apply `--set` overrides, then first-class flags (None means unset)."""
    document: dict = {}
    if path is not None:
        path = Path(path)
        if not path.exists():
            raise ConfigError(f"Ficheiro de configuração inexistente: {path}")
        try:
            document = tomllib.loads(path.read_text(encoding="utf-8"))
        except tomllib.TOMLDecodeError as exc:
            raise ConfigError(f"TOML inválido em {path}: {exc}") from exc

    document = apply_overrides(document, overrides or [])
    for key, value in flags.items():
        if value is None:
            continue
        if key == "iterations":
            document.setdefault("iql", {})["iterations"] = value
        elif key == "resume":
            document.setdefault("train", {})["resume"] = value
        else:
            document[key] = value

    config = config_from_document(document)
    logger.info(f"Configuração carregada: task={config.task}, method={config.method}, digest={config.digest}")
    return config
