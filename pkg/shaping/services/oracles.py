"""
Oráculos executáveis das propriedades da recompensa moldada.

A ProgressTrace is the part of a trajectory that shaping sees: the progress
indices k_0..k_H and the base rewards r_0..r_{H-1}. The checks here work on
traces, on ShapedTrajectory objects and on plain Trajectory objects.

Closed forms used by the oracles:
- telescoping: shaped return − base return = γ^H·Φ(H, k_H) − Φ(0, k_0)
- successful trajectory of length L (k_0 = 1, k_L = K, r = 1 on the last step):
  return = γ^(L−1) − γ^L·L/(T·K)
"""
from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from core.exceptions import DefinitionViolationError, PreconditionError, ShapingError
from gridworlds.services.records import Trajectory

from .augment import ShapedTrajectory
from .potential import ShapingParams, potential, shaped_reward

logger = logging.getLogger(__name__)

TOLERANCE = 1e-9

# Where the final index K is found on a successful trajectory.
FINAL_STATE = "final_state"  # k of the post-goal state s_L
BEFORE_FINAL = "before_final"  # k of s_{L-1}, the last state the agent acts from


@dataclass(frozen=True)
class ProgressTrace:
    ks: tuple[int, ...]
    rewards: tuple[float, ...]

    def __post_init__(self):
        if self.rewards and len(self.ks) != len(self.rewards) + 1:
            raise ShapingError(
                f"Trace inconsistente: {len(self.ks)} índices para {len(self.rewards)} recompensas"
            )

    def __len__(self) -> int:
        return len(self.rewards)

    @classmethod
    def from_shaped(cls, traj: ShapedTrajectory) -> ProgressTrace:
        return cls(tuple(traj.progress), tuple(tr.base_reward for tr in traj.transitions))


@dataclass(frozen=True)
class SuccessCheck:
    successful: bool
    conventions: tuple[str, ...] = ()
    reason: str = ""


@dataclass(frozen=True)
class OracleResult:
    name: str
    passed: bool
    samples: int
    worst: float
    detail: str = ""

    def as_dict(self) -> dict:
        return {
            "name": self.name,
            "passed": self.passed,
            "samples": self.samples,
            "worst": self.worst,
            "detail": self.detail,
        }


def discounted_return(rewards, gamma: float) -> float:
    rewards = np.asarray(rewards, dtype=float)
    if rewards.size == 0:
        return 0.0
    return float(np.sum(gamma ** np.arange(rewards.size) * rewards))


def trace_shaped_rewards(trace: ProgressTrace, params: ShapingParams) -> np.ndarray:
    if not len(trace):
        return np.zeros(0)
    ks = np.asarray(trace.ks)
    t = np.arange(len(trace))
    return np.atleast_1d(shaped_reward(np.asarray(trace.rewards, dtype=float), t, ks[:-1], ks[1:], params))


def trajectory_return(trajectory, params: ShapingParams, shaped: bool = False) -> float:
    """Σ γ^t r_t over a Trajectory, ShapedTrajectory or ProgressTrace (r′ when `shaped`)."""
    if isinstance(trajectory, ProgressTrace):
        rewards = trace_shaped_rewards(trajectory, params) if shaped else trajectory.rewards
        return discounted_return(rewards, params.gamma)

    if isinstance(trajectory, ShapedTrajectory):
        base = trajectory.as_base()
        rewards = [tr.reward if shaped else tr.base_reward for tr in trajectory.transitions]
    elif isinstance(trajectory, Trajectory):
        if shaped:
            raise ShapingError("Trajectória sem índices de progresso; aumente-a primeiro")
        base = trajectory
        rewards = [tr.reward for tr in trajectory.transitions]
    else:
        raise ShapingError(f"Tipo de trajectória não suportado: {type(trajectory).__name__}")

    if not base.is_consistent():
        raise ShapingError("Passos temporais não consecutivos a partir de 0")
    return discounted_return(rewards, params.gamma)


def telescoping_gap(trace: ProgressTrace, params: ShapingParams) -> float:
    if not len(trace):
        return 0.0
    horizon = len(trace)
    return (
        params.gamma ** horizon * potential(horizon, trace.ks[-1], params.horizon)
        - potential(0, trace.ks[0], params.horizon)
    )


def telescoping_residual(trace: ProgressTrace, params: ShapingParams) -> float:
    shaped = trajectory_return(trace, params, shaped=True)
    base = trajectory_return(trace, params, shaped=False)
    return abs(shaped - base - telescoping_gap(trace, params))


def check_successful(ks, K: int) -> SuccessCheck:
    ks = [int(k) for k in ks]
    if not ks:
        return SuccessCheck(False, reason="trajectória vazia")
    if ks[0] != 1:
        return SuccessCheck(False, reason=f"k_0={ks[0]}, esperado 1")
    for i, (a, b) in enumerate(zip(ks, ks[1:])):
        if b != a and b != a + 1:
            return SuccessCheck(False, reason=f"transição {a}->{b} no passo {i}")

    conventions = []
    if ks[-1] == K:
        conventions.append(FINAL_STATE)
    if len(ks) >= 2 and ks[-2] == K:
        conventions.append(BEFORE_FINAL)
    if not conventions:
        return SuccessCheck(False, reason=f"índice final {ks[-1]} != K={K}")
    return SuccessCheck(True, tuple(conventions))


def successful_return(length: int, K: int, params: ShapingParams) -> float:
    gamma = params.gamma
    return gamma ** (length - 1) - gamma ** length * length / (params.horizon * K)


def check_progress_gain(t, k_t, k_c, k_n, params: ShapingParams):
    """Δr = r′(k_c) − r′(k_n) for a progressing vs a non-progressing next index, zero base reward."""
    k_t, k_c, k_n = (np.asarray(v) for v in (k_t, k_c, k_n))
    if np.any(k_n > k_t) or np.any(k_t >= k_c):
        raise PreconditionError("Requer k_n <= k_t < k_c")
    t_next = np.asarray(t, dtype=float) + 1
    delta = params.gamma * (t_next / params.horizon) * (1.0 / k_n - 1.0 / k_c)
    return float(delta) if np.ndim(delta) == 0 else delta


def check_stall_penalty(t, k_t, k_next, params: ShapingParams):
    """ΔΦ = γΦ(t+1, k_{t+1}) − Φ(t, k_t) for a step without progress."""
    if np.any(np.asarray(k_next) > np.asarray(k_t)):
        raise PreconditionError("Requer k_{t+1} <= k_t")
    t = np.asarray(t, dtype=float)
    delta = params.gamma * potential(t + 1, k_next, params.horizon) - potential(t, k_t, params.horizon)
    return float(delta) if np.ndim(delta) == 0 else delta


def check_shorter_wins(short: ProgressTrace, long: ProgressTrace, params: ShapingParams, K: int | None = None) -> tuple[float, float]:
    if params.boundary_warning:
        raise PreconditionError(f"Requer gamma > (T-1)/T = {params.gamma_bound}")
    if len(short) >= len(long):
        raise PreconditionError(f"Requer comprimentos {len(short)} < {len(long)}")
    K = K if K is not None else max(max(short.ks), max(long.ks))
    for label, trace in (("curta", short), ("longa", long)):
        check = check_successful(trace.ks, K)
        if not check.successful:
            raise DefinitionViolationError(f"Trajectória {label} não é bem-sucedida: {check.reason}")
    return trajectory_return(short, params, shaped=True), trajectory_return(long, params, shaped=True)


def build_successful_trace(length: int, K: int, rng: np.random.Generator) -> ProgressTrace:
    """Random successful trace: K−1 unit crossings at random steps, reward 1 on the last step."""
    if length < max(K - 1, 1):
        raise ShapingError(f"Comprimento {length} insuficiente para K={K}")
    crossings = np.sort(rng.choice(np.arange(1, length + 1), size=K - 1, replace=False))
    ks = np.ones(length + 1, dtype=int)
    for step in crossings:
        ks[step:] += 1
    rewards = np.zeros(length)
    rewards[-1] = 1.0
    return ProgressTrace(tuple(int(k) for k in ks), tuple(float(r) for r in rewards))


def build_random_trace(length: int, K: int, rng: np.random.Generator) -> ProgressTrace:
    ks = rng.integers(1, K + 1, size=length + 1)
    rewards = rng.uniform(0.0, 1.0, size=length)
    return ProgressTrace(tuple(int(k) for k in ks), tuple(float(r) for r in rewards))


def _sweep_progress_gain(params, samples, max_k, rng) -> OracleResult:
    t = rng.integers(0, params.horizon, size=samples)
    k_t = rng.integers(1, max_k, size=samples)
    k_c = rng.integers(k_t + 1, max_k + 1)
    k_n = rng.integers(1, k_t + 1)
    delta = check_progress_gain(t, k_t, k_c, k_n, params)
    two_calls = shaped_reward(0.0, t, k_t, k_c, params) - shaped_reward(0.0, t, k_t, k_n, params)
    mismatch = float(np.max(np.abs(delta - two_calls)))
    passed = bool(np.all(delta > 0)) and mismatch <= 1e-12
    return OracleResult("progress_gain", passed, samples, float(np.min(delta)), f"max |Δ - diff| = {mismatch:.2e}")


def _sweep_stall_penalty(params, samples, max_k, rng) -> OracleResult:
    t = rng.integers(0, params.horizon, size=samples)
    k_t = rng.integers(1, max_k + 1, size=samples)
    k_next = rng.integers(1, k_t + 1)
    delta = check_stall_penalty(t, k_t, k_next, params)
    detail = "gamma no limite (T-1)/T" if params.boundary_warning else ""
    return OracleResult("stall_penalty", bool(np.all(delta < 0)), samples, float(np.max(delta)), detail)


def _sweep_telescoping(params, pairs, max_k, rng) -> OracleResult:
    worst = 0.0
    for _ in range(pairs):
        length = int(rng.integers(1, params.horizon + 1))
        trace = build_random_trace(length, int(rng.integers(1, max_k + 1)), rng)
        worst = max(worst, telescoping_residual(trace, params))
    return OracleResult("telescoping", worst <= TOLERANCE, pairs, worst)


def _sweep_equal_length(params, pairs, max_k, rng) -> OracleResult:
    worst = 0.0
    for _ in range(pairs):
        K = int(rng.integers(2, max_k + 1))
        length = int(rng.integers(K - 1, params.horizon + 1))
        a = build_successful_trace(length, K, rng)
        b = build_successful_trace(length, K, rng)
        ra = trajectory_return(a, params, shaped=True)
        rb = trajectory_return(b, params, shaped=True)
        worst = max(worst, abs(ra - rb), abs(ra - successful_return(length, K, params)))
    return OracleResult("equal_length", worst <= TOLERANCE, pairs, worst)


def _sweep_shorter_wins(params, pairs, max_k, rng) -> OracleResult:
    if params.boundary_warning:
        return OracleResult("shorter_wins", False, 0, 0.0, "requer gamma > (T-1)/T")
    worst = np.inf
    for _ in range(pairs):
        K = int(rng.integers(2, max_k + 1))
        short_len, long_len = sorted(rng.choice(np.arange(K - 1, params.horizon + 1), size=2, replace=False))
        short = build_successful_trace(int(short_len), K, rng)
        long = build_successful_trace(int(long_len), K, rng)
        r_short, r_long = check_shorter_wins(short, long, params, K)
        worst = min(worst, r_short - r_long)
    return OracleResult("shorter_wins", bool(worst > 0), pairs, float(worst))


def run_oracle_suite(
    params: ShapingParams,
    samples: int = 100_000,
    pairs: int = 1_000,
    seed: int = 0,
    max_k: int = 8,
) -> list[OracleResult]:
    rng = np.random.default_rng(seed)
    results = [
        _sweep_progress_gain(params, samples, max_k, rng),
        _sweep_stall_penalty(params, samples, max_k, rng),
        _sweep_equal_length(params, pairs, max_k, rng),
        _sweep_shorter_wins(params, pairs, max_k, rng),
        _sweep_telescoping(params, pairs, max_k, rng),
    ]
    for result in results:
        log = logger.info if result.passed else logger.error
        log(f"Oráculo {result.name}: {'ok' if result.passed else 'FALHOU'} ({result.samples} amostras, pior={result.worst:.3e})")
    return results
