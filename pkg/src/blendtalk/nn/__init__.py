from .autodiff import Tensor, backward, l2_normalize, no_grad
from .layers import Dense, GRULayer, GRUStack, MLP, ParameterSet, gru_forward
from .optim import Adam, AdamState, adam_step

__all__ = [
    "Adam",
    "AdamState",
    "Dense",
    "GRULayer",
    "GRUStack",
    "MLP",
    "ParameterSet",
    "Tensor",
    "adam_step",
    "backward",
    "gru_forward",
    "l2_normalize",
    "no_grad",
]
