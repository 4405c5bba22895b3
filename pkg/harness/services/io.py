"""
Ficheiros de artefactos: datasets (JSONL), datasets aumentados, schedules,
curvas e relatórios (CSV).

Dataset layout: a header line, then for every trajectory one trajectory record
followed by one record per transition. Keys are sorted and floats use their
shortest round-trip repr, so writing the same data always gives the same bytes.
"""
from __future__ import annotations

import csv
import io
import json
import logging
from pathlib import Path

from core.exceptions import ArtifactIOError, ConfigError, DatasetFormatError
from gridworlds.services.records import Dataset, Trajectory, Transition
from planner.services.schedule import SubgoalSchedule, schedule_from_document, schedule_to_document
from shaping.services.augment import ShapedDataset, ShapedTrajectory, ShapedTransition
from shaping.services.potential import ShapingParams

from .curves import CurvePoint
from .evaluation import EvalReport

logger = logging.getLogger(__name__)

DATASET_FORMAT = "storl-dataset"
SHAPED_FORMAT = "storl-shaped-dataset"
VERSION = 1


def _dumps(record: dict) -> str:
    return json.dumps(record, sort_keys=True, separators=(",", ":"))


def _as_tuple(value):
    if isinstance(value, list):
        return tuple(value)
    return value


def _transition_record(i: int, tr: Transition) -> dict:
    return {
        "traj": i,
        "t": tr.t,
        "s": list(tr.state),
        "a": list(tr.action) if isinstance(tr.action, tuple) else tr.action,
        "s2": list(tr.next_state),
        "r": tr.reward,
        "done": tr.done,
    }


def _transition_from(record: dict) -> Transition:
    return Transition(
        state=tuple(record["s"]),
        action=_as_tuple(record["a"]),
        next_state=tuple(record["s2"]),
        reward=record["r"],
        t=record["t"],
        done=record["done"],
    )


def _trajectory_record(i: int, traj) -> dict:
    return {
        "traj": i,
        "length": len(traj),
        "success": traj.success,
        "goal": list(traj.goal) if traj.goal is not None else None,
    }


def _read_lines(text: str, expected_format: str) -> tuple[dict, list[dict]]:
    lines = [line for line in text.splitlines() if line.strip()]
    if not lines:
        raise DatasetFormatError("Ficheiro de dataset vazio")
    try:
        records = [json.loads(line) for line in lines]
    except json.JSONDecodeError as exc:
        raise DatasetFormatError(f"Registo JSON inválido: {exc}") from exc
    header = records[0]
    if header.get("format") != expected_format or header.get("version") != VERSION:
        raise DatasetFormatError(
            f"Esperado {expected_format} v{VERSION}, encontrado {header.get('format')!r} v{header.get('version')!r}"
        )
    return header, records[1:]


def _group(records: list[dict], n_trajectories: int):
    """Yield (trajectory record, transition records) in file order."""
    position = 0
    for i in range(n_trajectories):
        if position >= len(records) or "length" not in records[position]:
            raise DatasetFormatError(f"Falta o registo da trajectória {i}")
        head = records[position]
        if head["traj"] != i:
            raise DatasetFormatError(f"Trajectória {head['traj']} fora de ordem, esperado {i}")
        body = records[position + 1:position + 1 + head["length"]]
        if len(body) != head["length"] or any(r.get("traj") != i or "t" not in r for r in body):
            raise DatasetFormatError(f"Transições em falta ou trocadas na trajectória {i}")
        position += 1 + head["length"]
        yield head, body
    if position != len(records):
        raise DatasetFormatError("Registos a mais no fim do ficheiro")


def dumps_dataset(dataset: Dataset) -> str:
    header = {
        "format": DATASET_FORMAT,
        "version": VERSION,
        "env_id": dataset.env_id,
        "seed": dataset.seed,
        "config_digest": dataset.config_digest,
        "trajectories": len(dataset),
        "digest": dataset.digest,
    }
    lines = [_dumps(header)]
    for i, traj in enumerate(dataset.trajectories):
        lines.append(_dumps(_trajectory_record(i, traj)))
        lines.extend(_dumps(_transition_record(i, tr)) for tr in traj.transitions)
    return "\n".join(lines) + "\n"


def loads_dataset(text: str) -> Dataset:
    header, records = _read_lines(text, DATASET_FORMAT)
    trajectories = tuple(
        Trajectory(
            transitions=tuple(_transition_from(r) for r in body),
            success=head["success"],
            goal=_as_tuple(head["goal"]),
        )
        for head, body in _group(records, header["trajectories"])
    )
    dataset = Dataset(
        env_id=header["env_id"],
        trajectories=trajectories,
        seed=header["seed"],
        config_digest=header["config_digest"],
    )
    if dataset.digest != header["digest"]:
        raise DatasetFormatError(f"Digest {dataset.digest} difere do cabeçalho {header['digest']}")
    return dataset


def dumps_shaped(dataset: ShapedDataset) -> str:
    header = {
        "format": SHAPED_FORMAT,
        "version": VERSION,
        "env_id": dataset.env_id,
        "seed": dataset.seed,
        "trajectories": len(dataset),
        "K": dataset.K,
        "source_digest": dataset.source_digest,
        "shaping": {
            "gamma": dataset.params.gamma,
            "horizon": dataset.params.horizon,
            "schedule_digest": dataset.params.schedule_digest,
        },
    }
    lines = [_dumps(header)]
    for i, traj in enumerate(dataset.trajectories):
        lines.append(_dumps(_trajectory_record(i, traj)))
        for tr in traj.transitions:
            record = _transition_record(i, tr.base)
            record.update({"r": tr.reward, "r_base": tr.base.reward, "k": tr.k, "k_next": tr.k_next})
            lines.append(_dumps(record))
    return "\n".join(lines) + "\n"


def loads_shaped(text: str) -> ShapedDataset:
    header, records = _read_lines(text, SHAPED_FORMAT)
    trajectories = []
    for head, body in _group(records, header["trajectories"]):
        transitions = []
        for r in body:
            base = _transition_from({**r, "r": r["r_base"]})
            transitions.append(ShapedTransition(base=base, k=r["k"], k_next=r["k_next"], reward=r["r"]))
        trajectories.append(ShapedTrajectory(tuple(transitions), head["success"], _as_tuple(head["goal"])))
    shaping = header["shaping"]
    return ShapedDataset(
        env_id=header["env_id"],
        trajectories=tuple(trajectories),
        params=ShapingParams(shaping["gamma"], shaping["horizon"], shaping["schedule_digest"]),
        K=header["K"],
        source_digest=header["source_digest"],
        seed=header["seed"],
    )


def _read_text(path: str | Path, what: str) -> str:
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"{what} inexistente: {path}")
    try:
        return path.read_text(encoding="utf-8")
    except UnicodeDecodeError as exc:
        raise ArtifactIOError(f"{what} não está em UTF-8: {path}") from exc
    except OSError as exc:
        raise ArtifactIOError(f"{what} ilegível: {path} ({exc.strerror or exc})") from exc


def _write_text(path: str | Path, text: str) -> Path:
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8")
    except OSError as exc:
        raise ArtifactIOError(f"Não foi possível gravar {path}: {exc.strerror or exc}") from exc
    logger.info(f"Artefacto gravado em {path}")
    return path


def write_dataset(path, dataset: Dataset) -> Path:
    return _write_text(path, dumps_dataset(dataset))


def read_dataset(path) -> Dataset:
    return loads_dataset(_read_text(path, "Dataset"))


def write_shaped(path, dataset: ShapedDataset) -> Path:
    return _write_text(path, dumps_shaped(dataset))


def read_shaped(path) -> ShapedDataset:
    return loads_shaped(_read_text(path, "Dataset aumentado"))


def write_schedule(path, schedule: SubgoalSchedule) -> Path:
    return _write_text(path, schedule_to_document(schedule))


def read_schedule(path) -> SubgoalSchedule:
    return schedule_from_document(_read_text(path, "Schedule"))


def curve_csv(points: list[CurvePoint], smoothed: list[CurvePoint] | None = None) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    columns = ["iteration", "success", "mean_steps"]
    if smoothed is not None:
        columns += ["success_smoothed", "mean_steps_smoothed"]
    writer.writerow(columns)
    for i, point in enumerate(points):
        row = [point.iteration, point.success, point.mean_steps]
        if smoothed is not None:
            row += [smoothed[i].success, smoothed[i].mean_steps]
        writer.writerow(row)
    return buffer.getvalue()


def read_curve(path) -> list[CurvePoint]:
    reader = csv.DictReader(io.StringIO(_read_text(path, "Curva")))
    return [
        CurvePoint(int(row["iteration"]), float(row["success"]), float(row["mean_steps"]))
        for row in reader
    ]


def report_csv(report: EvalReport, extra: dict | None = None) -> str:
    record = {**(extra or {}), **report.as_dict()}
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(list(record))
    writer.writerow(["" if v is None else v for v in record.values()])
    return buffer.getvalue()


def write_csv(path, text: str) -> Path:
    return _write_text(path, text)


def records_csv(records: list[dict]) -> str:
    """One row per record; columns follow the first record's key order."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    if records:
        writer.writerow(list(records[0]))
        for record in records:
            writer.writerow(["" if v is None else v for v in record.values()])
    return buffer.getvalue()


def write_json(path, document: dict) -> Path:
    return _write_text(path, json.dumps(document, indent=2, sort_keys=True) + "\n")


def write_text(path, text: str) -> Path:
    return _write_text(path, text)
