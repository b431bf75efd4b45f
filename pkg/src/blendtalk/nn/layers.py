"""Trainable building blocks: parameter registry, dense layers, MLP, GRU.

Initialization is uniform fan-in scaled (U(-1/sqrt(fan_in), +1/sqrt(fan_in)))
for weights and zero for biases, always drawn from an explicit Generator so
runs are reproducible.
"""

from __future__ import annotations

from collections.abc import Iterable

import numpy as np

from ..errors import ContractError, ShapeError
from . import autodiff as ad
from .autodiff import Tensor


class ParameterSet(dict):
    """Named map of trainable tensors with stable iteration order.

    Insertion order is the canonical order; duplicate names are rejected so
    checkpoints stay unambiguous.
    """

    def add(self, name: str, tensor: Tensor) -> Tensor:
        if name in self:
            raise ContractError(f"duplicate parameter name: {name!r}")
        self[name] = tensor
        return tensor

    def merge(self, other: "ParameterSet", prefix: str = "") -> None:
        for name, tensor in other.items():
            self.add(prefix + name, tensor)

    def zero_grad(self) -> None:
        for tensor in self.values():
            tensor.zero_grad()


def uniform_init(shape: tuple[int, ...], fan_in: int, rng: np.random.Generator) -> np.ndarray:
    bound = 1.0 / np.sqrt(max(fan_in, 1))
    return rng.uniform(-bound, bound, size=shape)


class Dense:
    """Affine map y = x @ W + b for 2-D inputs (rows are samples)."""

    def __init__(self, d_in: int, d_out: int, rng: np.random.Generator):
        self.d_in = d_in
        self.d_out = d_out
        self.w = Tensor(uniform_init((d_in, d_out), d_in, rng), requires_grad=True)
        self.b = Tensor(np.zeros(d_out), requires_grad=True)

    def __call__(self, x: Tensor) -> Tensor:
        return ad.add(ad.matmul(x, self.w), self.b)

    def params(self, prefix: str) -> ParameterSet:
        out = ParameterSet()
        out.add(f"{prefix}.w", self.w)
        out.add(f"{prefix}.b", self.b)
        return out


class MLP:
    """Dense stack with tanh between layers and a linear final layer."""

    def __init__(self, dims: Iterable[int], rng: np.random.Generator):
        dims = list(dims)
        if len(dims) < 2:
            raise ContractError("MLP needs at least input and output dims")
        self.layers = [Dense(a, b, rng) for a, b in zip(dims[:-1], dims[1:])]

    def __call__(self, x: Tensor) -> Tensor:
        for layer in self.layers[:-1]:
            x = ad.tanh(layer(x))
        return self.layers[-1](x)

    def params(self, prefix: str) -> ParameterSet:
        out = ParameterSet()
        for i, layer in enumerate(self.layers):
            out.merge(layer.params(f"{prefix}.l{i}"))
        return out


class GRULayer:
    """Single GRU layer with fused gate weights.

    Gate layout along the last axis is [reset, update, candidate], matching
    the usual r/z/n formulation:

        r = sigmoid(x W_ir + h W_hr + b_ir + b_hr)
        z = sigmoid(x W_iz + h W_hz + b_iz + b_hz)
        n = tanh(x W_in + b_in + r * (h W_hn + b_hn))
        h' = (1 - z) * n + z * h
    """

    def __init__(self, d_in: int, hidden: int, rng: np.random.Generator):
        self.d_in = d_in
        self.hidden = hidden
        self.w_ih = Tensor(uniform_init((d_in, 3 * hidden), d_in, rng), requires_grad=True)
        self.w_hh = Tensor(uniform_init((hidden, 3 * hidden), hidden, rng), requires_grad=True)
        self.b_ih = Tensor(np.zeros(3 * hidden), requires_grad=True)
        self.b_hh = Tensor(np.zeros(3 * hidden), requires_grad=True)

    def step(self, x: Tensor, h: Tensor) -> Tensor:
        hid = self.hidden
        gi = ad.add(ad.matmul(x, self.w_ih), self.b_ih)
        gh = ad.add(ad.matmul(h, self.w_hh), self.b_hh)
        r = ad.sigmoid(ad.add(gi[:, :hid], gh[:, :hid]))
        z = ad.sigmoid(ad.add(gi[:, hid : 2 * hid], gh[:, hid : 2 * hid]))
        n = ad.tanh(ad.add(gi[:, 2 * hid :], ad.mul(r, gh[:, 2 * hid :])))
        return ad.add(n, ad.mul(z, ad.sub(h, n)))

    def params(self, prefix: str) -> ParameterSet:
        out = ParameterSet()
        out.add(f"{prefix}.w_ih", self.w_ih)
        out.add(f"{prefix}.w_hh", self.w_hh)
        out.add(f"{prefix}.b_ih", self.b_ih)
        out.add(f"{prefix}.b_hh", self.b_hh)
        return out


class GRUStack:
    """Stacked GRU layers processed frame by frame (causal)."""

    def __init__(self, d_in: int, hidden: int, num_layers: int, rng: np.random.Generator):
        self.hidden = hidden
        self.layers = [GRULayer(d_in if i == 0 else hidden, hidden, rng) for i in range(num_layers)]

    def forward_frames(self, frames: list[Tensor], batch: int) -> list[Tensor]:
        """Run the stack over a list of (batch, d) frame tensors."""
        states = [Tensor(np.zeros((batch, self.hidden))) for _ in self.layers]
        outputs: list[Tensor] = []
        for frame in frames:
            x = frame
            for i, layer in enumerate(self.layers):
                states[i] = layer.step(x, states[i])
                x = states[i]
            outputs.append(x)
        return outputs

    def params(self, prefix: str) -> ParameterSet:
        out = ParameterSet()
        for i, layer in enumerate(self.layers):
            out.merge(layer.params(f"{prefix}.gru{i}"))
        return out


def gru_forward(params: ParameterSet, inputs, h0=None) -> Tensor:
    """Run a single-layer GRU over one sequence.

    ``params`` must hold ``w_ih``, ``w_hh``, ``b_ih``, ``b_hh`` (any shared
    prefix). ``inputs`` is (frames, d_in); ``h0`` is the initial hidden state,
    zeros when omitted. Returns the (frames, hidden) output sequence.
    """
    by_suffix = {}
    for name, tensor in params.items():
        suffix = name.rsplit(".", 1)[-1]
        by_suffix[suffix] = tensor
    try:
        w_ih, w_hh = by_suffix["w_ih"], by_suffix["w_hh"]
        b_ih, b_hh = by_suffix["b_ih"], by_suffix["b_hh"]
    except KeyError as exc:
        raise ContractError(f"GRU parameter missing: {exc}") from exc

    inputs = ad.as_tensor(inputs)
    if inputs.data.ndim != 2:
        raise ShapeError("gru_forward expects a (frames, d_in) input")
    d_in = inputs.data.shape[1]
    if w_ih.data.shape[0] != d_in or w_ih.data.shape[1] != w_hh.data.shape[1]:
        raise ShapeError(
            f"GRU weight shapes {w_ih.data.shape}/{w_hh.data.shape} do not match input width {d_in}"
        )
    hidden = w_hh.data.shape[0]

    layer = GRULayer.__new__(GRULayer)
    layer.d_in = d_in
    layer.hidden = hidden
    layer.w_ih, layer.w_hh, layer.b_ih, layer.b_hh = w_ih, w_hh, b_ih, b_hh

    if h0 is None:
        h = Tensor(np.zeros((1, hidden)))
    else:
        h0 = ad.as_tensor(h0)
        if h0.data.shape != (hidden,):
            raise ShapeError(f"h0 must have shape ({hidden},)")
        h = reshape_row(h0)

    rows = []
    for f in range(inputs.data.shape[0]):
        h = layer.step(inputs[f : f + 1, :], h)
        rows.append(h)
    return ad.concat(rows, axis=0)


def reshape_row(v: Tensor) -> Tensor:
    """View a (d,) tensor as a (1, d) row with gradient flow."""
    data = v.data.reshape(1, v.data.shape[0])

    def backward(grad):
        if v.requires_grad:
            v._accumulate(grad.reshape(v.data.shape))

    return ad._make(data, (v,), backward)
