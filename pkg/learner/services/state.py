"""
Estado do learner (redes, momentos Adam, contador, RNG) e selecção de acções.

Networks per method:
- storl / iql: value V(s), twin Q(s, a) with target copies, policy π(s)
- gcbc: policy π(s ⊕ one-hot(k)) only
Discrete policies output logits over the 4 moves; continuous ones a force mean.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from core.exceptions import ConfigError
from planner.services.schedule import SubgoalSchedule, progress_index

from .encoding import Encoder
from .network import AdamState, NetParams, NetworkSpec, forward

STORL = "storl"
IQL = "iql"
GCBC = "gcbc"
METHODS = (STORL, IQL, GCBC)

GREEDY = "greedy"
SAMPLE = "sample"


@dataclass
class LearnerState:
    method: str
    discrete: bool
    state_width: int
    action_width: int
    n_subgoals: int
    networks: dict[str, NetParams]
    optimizers: dict[str, AdamState]
    seed: int
    rng: np.random.Generator
    step: int = 0
    network_spec: NetworkSpec = field(default_factory=NetworkSpec)

    @property
    def policy(self) -> NetParams:
        return self.networks["policy"]

    @property
    def has_critic(self) -> bool:
        return "value" in self.networks

    def is_finite(self) -> bool:
        return all(net.is_finite() for net in self.networks.values())


def init_learner(
    method: str,
    encoder: Encoder,
    seed: int,
    network: NetworkSpec | None = None,
    n_subgoals: int = 0,
) -> LearnerState:
    if method not in METHODS:
        raise ConfigError(f"Método desconhecido: {method!r}")
    network = network or NetworkSpec()
    rng = np.random.default_rng(seed)
    sw, aw = encoder.state_width, encoder.action_width

    networks: dict[str, NetParams] = {}
    if method == GCBC:
        if n_subgoals < 1:
            raise ConfigError("GC-BC requer um schedule com K >= 1")
        networks["policy"] = NetParams.init(network.sizes(sw + n_subgoals, aw), rng, network.activation)
    else:
        networks["value"] = NetParams.init(network.sizes(sw, 1), rng, network.activation)
        networks["q1"] = NetParams.init(network.sizes(sw + aw, 1), rng, network.activation)
        networks["q2"] = NetParams.init(network.sizes(sw + aw, 1), rng, network.activation)
        networks["policy"] = NetParams.init(network.sizes(sw, aw), rng, network.activation)
        networks["q1_target"] = networks["q1"].copy()
        networks["q2_target"] = networks["q2"].copy()

    optimizers = {
        name: AdamState.for_params(net)
        for name, net in networks.items()
        if not name.endswith("_target")
    }
    return LearnerState(
        method=method,
        discrete=encoder.discrete,
        state_width=sw,
        action_width=aw,
        n_subgoals=n_subgoals if method == GCBC else 0,
        networks=networks,
        optimizers=optimizers,
        seed=seed,
        rng=rng,
        network_spec=network,
    )


def policy_inputs(learner: LearnerState, states: np.ndarray, subgoals: np.ndarray | None = None) -> np.ndarray:
    if learner.method == GCBC:
        if subgoals is None:
            raise ConfigError("GC-BC precisa do sub-objectivo corrente")
        return np.concatenate([states, subgoals], axis=1)
    return states


def log_softmax(logits: np.ndarray) -> np.ndarray:
    shifted = logits - logits.max(axis=1, keepdims=True)
    return shifted - np.log(np.exp(shifted).sum(axis=1, keepdims=True))


def act(
    learner: LearnerState,
    states: np.ndarray,
    mode: str = GREEDY,
    rng: np.random.Generator | None = None,
    subgoals: np.ndarray | None = None,
) -> np.ndarray:
    """Actions for a batch of encoded states. Greedy ties go to the lowest action index."""
    out = forward(learner.policy, policy_inputs(learner, states, subgoals))
    if mode not in (GREEDY, SAMPLE):
        raise ConfigError(f"Modo de acção desconhecido: {mode!r}")
    if mode == SAMPLE and rng is None:
        rng = learner.rng

    if learner.discrete:
        if mode == GREEDY:
            return np.argmax(out, axis=1)
        probs = np.exp(log_softmax(out))
        draws = rng.random(size=(out.shape[0], 1))
        picks = (probs.cumsum(axis=1) < draws).sum(axis=1)
        return np.minimum(picks, out.shape[1] - 1)

    if mode == SAMPLE:
        out = out + rng.normal(size=out.shape)
    return np.clip(out, -1.0, 1.0)


def state_values(learner: LearnerState, states: np.ndarray) -> np.ndarray:
    if not learner.has_critic:
        raise ConfigError(f"O método {learner.method} não tem função de valor")
    return forward(learner.networks["value"], states)[:, 0]


def q_values(learner: LearnerState, states: np.ndarray) -> np.ndarray:
    """min(Q1, Q2) for every discrete action: shape (N, 4)."""
    if not learner.has_critic or not learner.discrete:
        raise ConfigError("Valores Q por acção só existem para tarefas discretas com crítico")
    columns = []
    for a in range(learner.action_width):
        actions = np.zeros((states.shape[0], learner.action_width))
        actions[:, a] = 1.0
        sa = np.concatenate([states, actions], axis=1)
        columns.append(np.minimum(forward(learner.networks["q1"], sa), forward(learner.networks["q2"], sa))[:, 0])
    return np.stack(columns, axis=1)


class LearnedPolicy:
    """Callable policy over raw env states, for rollouts."""

    def __init__(
        self,
        learner: LearnerState,
        encoder: Encoder,
        schedule: SubgoalSchedule | None = None,
        mode: str = GREEDY,
        rng: np.random.Generator | None = None,
    ):
        if learner.method == GCBC and schedule is None:
            raise ConfigError("GC-BC precisa do schedule para escolher o sub-objectivo")
        self.learner = learner
        self.encoder = encoder
        self.schedule = schedule
        self.mode = mode
        self.rng = rng

    def __call__(self, states, goals=None) -> list:
        # the goal point is not part of the learner input
        encoded = self.encoder.states(states)
        subgoals = None
        if self.learner.method == GCBC:
            ks = [progress_index(self.schedule, s) for s in states]
            subgoals = Encoder.subgoals(ks, self.learner.n_subgoals)
        actions = act(self.learner, encoded, self.mode, self.rng, subgoals)
        if self.encoder.discrete:
            return [int(a) for a in actions]
        return [(float(a[0]), float(a[1])) for a in actions]
