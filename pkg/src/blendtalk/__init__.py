"""blendtalk: speech-driven blendshape animation with a distilled conditional diffusion model."""

__version__ = "0.1.0"
