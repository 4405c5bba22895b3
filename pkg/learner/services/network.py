"""
Rede densa com gradientes manuais e optimizador Adam (numpy).

Layout: x @ W + b per layer, rows are samples. Hidden layers use the configured
activation; the output layer is linear. `backward` returns gradients summed
over the batch: callers scale the output gradient (e.g. by 1/N) themselves.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from core.exceptions import ShapeMismatchError


def _relu(z):
    return np.maximum(z, 0.0)


def _relu_grad(z, a):
    return (z > 0).astype(float)


def _tanh(z):
    return np.tanh(z)


def _tanh_grad(z, a):
    return 1.0 - a * a


ACTIVATIONS = {
    "relu": (_relu, _relu_grad),
    "tanh": (_tanh, _tanh_grad),
}


@dataclass
class NetParams:
    weights: list[np.ndarray]
    biases: list[np.ndarray]
    activation: str = "relu"

    def __post_init__(self):
        if self.activation not in ACTIVATIONS:
            raise ShapeMismatchError(f"Activação desconhecida: {self.activation}")
        if len(self.weights) != len(self.biases):
            raise ShapeMismatchError("Número de pesos e biases difere")
        for w, b in zip(self.weights, self.biases):
            if w.ndim != 2 or b.shape != (w.shape[1],):
                raise ShapeMismatchError(f"Camada incoerente: W{w.shape}, b{b.shape}")
        for prev, nxt in zip(self.weights[:-1], self.weights[1:]):
            if nxt.shape[0] != prev.shape[1]:
                raise ShapeMismatchError("Larguras de camadas consecutivas não coincidem")

    @classmethod
    def init(cls, sizes, rng: np.random.Generator, activation: str = "relu", output_scale: float = 0.01) -> NetParams:
        weights, biases = [], []
        n_layers = len(sizes) - 1
        for i, (fan_in, fan_out) in enumerate(zip(sizes[:-1], sizes[1:])):
            scale = np.sqrt(2.0 / fan_in) if activation == "relu" else np.sqrt(1.0 / fan_in)
            if i == n_layers - 1:
                scale = output_scale
            weights.append(rng.normal(0.0, scale, size=(fan_in, fan_out)))
            biases.append(np.zeros(fan_out))
        return cls(weights, biases, activation)

    @classmethod
    def zeros(cls, sizes, activation: str = "relu") -> NetParams:
        return cls(
            [np.zeros((a, b)) for a, b in zip(sizes[:-1], sizes[1:])],
            [np.zeros(b) for b in sizes[1:]],
            activation,
        )

    @property
    def sizes(self) -> list[int]:
        return [self.weights[0].shape[0]] + [w.shape[1] for w in self.weights]

    @property
    def input_width(self) -> int:
        return self.weights[0].shape[0]

    @property
    def output_width(self) -> int:
        return self.weights[-1].shape[1]

    def arrays(self) -> list[np.ndarray]:
        out = []
        for w, b in zip(self.weights, self.biases):
            out.extend((w, b))
        return out

    def flat(self) -> np.ndarray:
        return np.concatenate([a.ravel() for a in self.arrays()])

    @classmethod
    def from_flat(cls, sizes, vector: np.ndarray, activation: str = "relu") -> NetParams:
        template = cls.zeros(sizes, activation)
        expected = template.flat().size
        if vector.size != expected:
            raise ShapeMismatchError(f"Vector com {vector.size} parâmetros, esperado {expected}")
        offset = 0
        for array in template.arrays():
            array[...] = vector[offset:offset + array.size].reshape(array.shape)
            offset += array.size
        return template

    def copy(self) -> NetParams:
        return NetParams([w.copy() for w in self.weights], [b.copy() for b in self.biases], self.activation)

    def zeros_like(self) -> NetParams:
        return NetParams.zeros(self.sizes, self.activation)

    def is_finite(self) -> bool:
        return all(np.all(np.isfinite(a)) for a in self.arrays())


def _check_input(params: NetParams, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.ndim == 1:
        x = x[None, :]
    if x.ndim != 2 or x.shape[1] != params.input_width:
        raise ShapeMismatchError(f"Entrada {x.shape} incompatível com largura {params.input_width}")
    return x


def forward_with_cache(params: NetParams, x):
    x = _check_input(params, x)
    act, _ = ACTIVATIONS[params.activation]
    pre, post = [], [x]
    h = x
    last = len(params.weights) - 1
    for i, (w, b) in enumerate(zip(params.weights, params.biases)):
        z = h @ w + b
        pre.append(z)
        h = z if i == last else act(z)
        post.append(h)
    return h, (pre, post)


def forward(params: NetParams, x) -> np.ndarray:
    return forward_with_cache(params, x)[0]


def backward(params: NetParams, x, grad_out) -> NetParams:
    """Gradients of Σ_batch <grad_out, f(x)> with respect to every weight and bias."""
    out, (pre, post) = forward_with_cache(params, x)
    grad = np.asarray(grad_out, dtype=float)
    if grad.size != out.size:
        raise ShapeMismatchError(f"Gradiente de saída {grad.shape} incompatível com {out.shape}")
    grad = grad.reshape(out.shape)

    _, act_grad = ACTIVATIONS[params.activation]
    grads_w = [None] * len(params.weights)
    grads_b = [None] * len(params.biases)
    for i in reversed(range(len(params.weights))):
        grads_w[i] = post[i].T @ grad
        grads_b[i] = grad.sum(axis=0)
        if i > 0:
            grad = (grad @ params.weights[i].T) * act_grad(pre[i - 1], post[i])
    return NetParams(grads_w, grads_b, params.activation)


@dataclass
class AdamState:
    m: NetParams
    v: NetParams
    step: int = 0
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8

    @classmethod
    def for_params(cls, params: NetParams) -> AdamState:
        return cls(m=params.zeros_like(), v=params.zeros_like())


def adam_step(params: NetParams, grads: NetParams, state: AdamState, learning_rate: float) -> None:
    """In-place Adam update of `params` and `state`."""
    if grads.sizes != params.sizes:
        raise ShapeMismatchError(f"Gradientes {grads.sizes} vs parâmetros {params.sizes}")
    state.step += 1
    correction1 = 1.0 - state.beta1 ** state.step
    correction2 = 1.0 - state.beta2 ** state.step
    for p, g, m, v in zip(params.arrays(), grads.arrays(), state.m.arrays(), state.v.arrays()):
        m *= state.beta1
        m += (1.0 - state.beta1) * g
        v *= state.beta2
        v += (1.0 - state.beta2) * g * g
        p -= learning_rate * (m / correction1) / (np.sqrt(v / correction2) + state.eps)


def blend(target: NetParams, live: NetParams, rate: float) -> None:
    """Polyak update target ← (1−ρ)·target + ρ·live, in place; ρ = 1 copies exactly."""
    for t, lv in zip(target.arrays(), live.arrays()):
        if rate >= 1.0:
            t[...] = lv
        else:
            t *= 1.0 - rate
            t += rate * lv


@dataclass(frozen=True)
class NetworkSpec:
    hidden: tuple[int, ...] = (128, 128)
    activation: str = "relu"

    def sizes(self, input_width: int, output_width: int) -> list[int]:
        return [input_width, *self.hidden, output_width]
