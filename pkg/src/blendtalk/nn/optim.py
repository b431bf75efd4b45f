"""Adam optimizer with bias correction."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import ContractError
from .autodiff import Tensor
from .layers import ParameterSet


@dataclass
class AdamState:
    lr: float = 1e-4
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    step: int = 0
    m: dict[str, np.ndarray] = field(default_factory=dict)
    v: dict[str, np.ndarray] = field(default_factory=dict)

    def ensure(self, params: ParameterSet) -> None:
        for name, tensor in params.items():
            if name not in self.m:
                self.m[name] = np.zeros_like(tensor.data)
                self.v[name] = np.zeros_like(tensor.data)


def adam_step(params: ParameterSet, grads: dict[str, np.ndarray], state: AdamState) -> AdamState:
    """Apply one bias-corrected Adam update in place.

    Every parameter must have a gradient entry; moments are created lazily
    with matching shapes.
    """
    missing = [name for name in params if name not in grads]
    if missing:
        raise ContractError(f"missing gradients for parameters: {missing[:3]}")
    state.ensure(params)
    state.step += 1
    bc1 = 1.0 - state.beta1**state.step
    bc2 = 1.0 - state.beta2**state.step
    for name, tensor in params.items():
        g = grads[name]
        m = state.m[name]
        v = state.v[name]
        m *= state.beta1
        m += (1.0 - state.beta1) * g
        v *= state.beta2
        v += (1.0 - state.beta2) * g * g
        tensor.data -= state.lr * (m / bc1) / (np.sqrt(v / bc2) + state.eps)
    return state


class Adam:
    """Convenience wrapper reading gradients off the tensors themselves."""

    def __init__(self, params: ParameterSet, lr: float = 1e-4, beta1: float = 0.9, beta2: float = 0.999, eps: float = 1e-8):
        self.params = params
        self.state = AdamState(lr=lr, beta1=beta1, beta2=beta2, eps=eps)
        self.state.ensure(params)

    def step(self) -> None:
        grads = {}
        for name, tensor in self.params.items():
            grads[name] = tensor.grad if tensor.grad is not None else np.zeros_like(tensor.data)
        adam_step(self.params, grads, self.state)

    def zero_grad(self) -> None:
        self.params.zero_grad()
