"""
Ficheiro de checkpoint do learner.

Layout: one JSON header line (format, version, method, widths, step, seed,
hyperparameters, RNG state, per-network sizes and Adam counters) followed by
the raw little-endian float64 payload. For every network in header order the
payload holds the parameters, then the Adam first and second moments when the
network is trained. Loading rebuilds a LearnerState that continues training
exactly where the saved one stopped.
"""
from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from core.exceptions import ArtifactIOError, CheckpointFormatError, ConfigError

from .iql import IQLHyper
from .network import AdamState, NetParams, NetworkSpec
from .state import LearnerState

logger = logging.getLogger(__name__)

FORMAT = "storl-checkpoint"
VERSION = 1
_DTYPE = np.dtype("<f8")


@dataclass
class Checkpoint:
    learner: LearnerState
    hyper: IQLHyper
    meta: dict = field(default_factory=dict)


def _header(learner: LearnerState, hyper: IQLHyper, meta: dict) -> dict:
    nets = []
    for name, net in learner.networks.items():
        entry = {"name": name, "sizes": net.sizes, "activation": net.activation}
        optimizer = learner.optimizers.get(name)
        if optimizer is not None:
            entry["adam"] = {
                "step": optimizer.step,
                "beta1": optimizer.beta1,
                "beta2": optimizer.beta2,
                "eps": optimizer.eps,
            }
        nets.append(entry)
    return {
        "format": FORMAT,
        "version": VERSION,
        "method": learner.method,
        "discrete": learner.discrete,
        "state_width": learner.state_width,
        "action_width": learner.action_width,
        "n_subgoals": learner.n_subgoals,
        "step": learner.step,
        "seed": learner.seed,
        "network": {
            "hidden": list(learner.network_spec.hidden),
            "activation": learner.network_spec.activation,
        },
        "hyper": hyper.as_dict(),
        "rng": learner.rng.bit_generator.state,
        "nets": nets,
        "meta": meta,
    }


def checkpoint_bytes(learner: LearnerState, hyper: IQLHyper, meta: dict | None = None) -> bytes:
    header = _header(learner, hyper, meta or {})
    chunks = []
    for name, net in learner.networks.items():
        chunks.append(net.flat())
        optimizer = learner.optimizers.get(name)
        if optimizer is not None:
            chunks.extend((optimizer.m.flat(), optimizer.v.flat()))
    payload = np.concatenate(chunks).astype(_DTYPE).tobytes() if chunks else b""
    header["payload_values"] = len(payload) // _DTYPE.itemsize
    line = json.dumps(header, sort_keys=True, separators=(",", ":")) + "\n"
    return line.encode("utf-8") + payload


def _take(payload: np.ndarray, offset: int, count: int) -> tuple[np.ndarray, int]:
    if offset + count > payload.size:
        raise CheckpointFormatError("Checkpoint truncado")
    return payload[offset:offset + count], offset + count


def parse_checkpoint(data: bytes) -> Checkpoint:
    newline = data.find(b"\n")
    if newline < 0:
        raise CheckpointFormatError("Checkpoint sem cabeçalho")
    try:
        header = json.loads(data[:newline].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise CheckpointFormatError(f"Cabeçalho de checkpoint inválido: {exc}") from exc

    if header.get("format") != FORMAT:
        raise CheckpointFormatError(f"Formato inesperado: {header.get('format')!r}")
    if header.get("version") != VERSION:
        raise CheckpointFormatError(f"Versão de checkpoint não suportada: {header.get('version')!r}")

    raw = data[newline + 1:]
    if len(raw) % _DTYPE.itemsize:
        raise CheckpointFormatError("Payload com tamanho inválido")
    payload = np.frombuffer(raw, dtype=_DTYPE)
    if payload.size != header.get("payload_values"):
        raise CheckpointFormatError(
            f"Payload com {payload.size} valores, cabeçalho indica {header.get('payload_values')}"
        )

    networks: dict[str, NetParams] = {}
    optimizers: dict[str, AdamState] = {}
    offset = 0
    for entry in header["nets"]:
        sizes, activation = entry["sizes"], entry["activation"]
        count = NetParams.zeros(sizes, activation).flat().size
        chunk, offset = _take(payload, offset, count)
        networks[entry["name"]] = NetParams.from_flat(sizes, chunk, activation)
        if "adam" in entry:
            m, offset = _take(payload, offset, count)
            v, offset = _take(payload, offset, count)
            adam = entry["adam"]
            optimizers[entry["name"]] = AdamState(
                m=NetParams.from_flat(sizes, m, activation),
                v=NetParams.from_flat(sizes, v, activation),
                step=adam["step"],
                beta1=adam["beta1"],
                beta2=adam["beta2"],
                eps=adam["eps"],
            )

    rng = np.random.default_rng()
    rng.bit_generator.state = header["rng"]
    learner = LearnerState(
        method=header["method"],
        discrete=header["discrete"],
        state_width=header["state_width"],
        action_width=header["action_width"],
        n_subgoals=header["n_subgoals"],
        networks=networks,
        optimizers=optimizers,
        seed=header["seed"],
        rng=rng,
        step=header["step"],
        network_spec=NetworkSpec(
            hidden=tuple(header["network"]["hidden"]),
            activation=header["network"]["activation"],
        ),
    )
    return Checkpoint(learner=learner, hyper=IQLHyper(**header["hyper"]), meta=header["meta"])


def save_checkpoint(path: str | Path, learner: LearnerState, hyper: IQLHyper, meta: dict | None = None) -> Path:
    path = Path(path)
    payload = checkpoint_bytes(learner, hyper, meta)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_bytes(payload)
    except OSError as exc:
        raise ArtifactIOError(f"Não foi possível gravar o checkpoint {path}: {exc.strerror or exc}") from exc
    logger.info(f"Checkpoint {learner.method} (passo {learner.step}) gravado em {path}")
    return path


def load_checkpoint(path: str | Path) -> Checkpoint:
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"Checkpoint inexistente: {path}")
    try:
        payload = path.read_bytes()
    except OSError as exc:
        raise ArtifactIOError(f"Checkpoint ilegível: {path} ({exc.strerror or exc})") from exc
    return parse_checkpoint(payload)
