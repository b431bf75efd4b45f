"""Closed-form DDPM mathematics.

The forward process adds Gaussian noise in one shot,

    x_t = a_t * x0 + s_t * eps,      a_t = sqrt(alpha_bar_t), s_t = sqrt(1 - alpha_bar_t),

so a_t^2 + s_t^2 == 1 for every step (variance preserving). The reverse
(ancestral) step consumes a noise estimate,

    x_{t-1} = (x_t - ((1 - alpha_t) / sqrt(1 - alpha_bar_t)) * eps_hat) / sqrt(alpha_t) + sigma_t * z,

with sigma_t = sqrt(beta_t) and sigma forced to zero on the final step so the
chain ends deterministically. Because the denoiser predicts the clean data
x0_hat rather than the noise, :func:`x0_to_eps` bridges the two
parameterizations exactly.

Step indices are 1-based: t runs over [1, T], and alpha_bar at the virtual
step 0 is 1 (no noise).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, ShapeError, SingularityError, StepRangeError


@dataclass(frozen=True)
class NoiseSchedule:
    """Per-step noise levels and the scale tables derived from them."""

    betas: np.ndarray
    alphas: np.ndarray = field(init=False)
    alpha_bars: np.ndarray = field(init=False)
    signal_scale: np.ndarray = field(init=False)
    noise_scale: np.ndarray = field(init=False)
    snr: np.ndarray = field(init=False)

    def __post_init__(self):
        betas = np.asarray(self.betas, dtype=np.float64)
        if betas.ndim != 1 or betas.size == 0:
            raise ConfigError("schedule needs a non-empty 1-D beta vector")
        if np.any(betas <= 0.0) or np.any(betas >= 1.0):
            raise ConfigError("betas must lie strictly inside (0, 1)")
        object.__setattr__(self, "betas", betas)
        alphas = 1.0 - betas
        alpha_bars = np.cumprod(alphas)
        signal = np.sqrt(alpha_bars)
        noise = np.sqrt(1.0 - alpha_bars)
        object.__setattr__(self, "alphas", alphas)
        object.__setattr__(self, "alpha_bars", alpha_bars)
        object.__setattr__(self, "signal_scale", signal)
        object.__setattr__(self, "noise_scale", noise)
        object.__setattr__(self, "snr", alpha_bars / (1.0 - alpha_bars))

    @property
    def num_steps(self) -> int:
        return int(self.betas.size)

    def _check_step(self, t: int, allow_zero: bool = False) -> int:
        t = int(t)
        low = 0 if allow_zero else 1
        if not low <= t <= self.num_steps:
            raise StepRangeError(f"step {t} outside [{low}, {self.num_steps}]")
        return t

    def beta(self, t: int) -> float:
        return float(self.betas[self._check_step(t) - 1])

    def alpha(self, t: int) -> float:
        return float(self.alphas[self._check_step(t) - 1])

    def alpha_bar(self, t: int) -> float:
        t = self._check_step(t, allow_zero=True)
        return 1.0 if t == 0 else float(self.alpha_bars[t - 1])

    def a(self, t: int) -> float:
        """Signal scale sqrt(alpha_bar_t); a(0) == 1."""
        t = self._check_step(t, allow_zero=True)
        return 1.0 if t == 0 else float(self.signal_scale[t - 1])

    def s(self, t: int) -> float:
        """Noise scale sqrt(1 - alpha_bar_t); s(0) == 0."""
        t = self._check_step(t, allow_zero=True)
        return 0.0 if t == 0 else float(self.noise_scale[t - 1])

    def snr_at(self, t: int) -> float:
        return float(self.snr[self._check_step(t) - 1])

    def halved(self) -> "NoiseSchedule":
        """Schedule with half the steps, keeping every second noise level.

        Student step tau reuses alpha_bar at step 2*tau, so noise levels (and
        the terminal SNR) are preserved across distillation stages.
        """
        if self.num_steps % 2 != 0:
            raise ConfigError(f"cannot halve a schedule with odd step count {self.num_steps}")
        sub_bars = self.alpha_bars[1::2]
        prev = np.concatenate([[1.0], sub_bars[:-1]])
        return NoiseSchedule(betas=1.0 - sub_bars / prev)


@dataclass
class LatentState:
    """Noisy coefficients at a known diffusion step."""

    x: np.ndarray
    t: int


def build_schedule(num_steps: int, beta_start: float = 1e-4, beta_end: float = 0.02) -> NoiseSchedule:
    """Linear beta schedule from ``beta_start`` to ``beta_end`` inclusive."""
    if num_steps < 1:
        raise ConfigError("num_steps must be >= 1")
    if not (0.0 < beta_start <= beta_end < 1.0):
        raise ConfigError("need 0 < beta_start <= beta_end < 1")
    if num_steps == 1:
        betas = np.array([beta_start])
    else:
        betas = np.linspace(beta_start, beta_end, num_steps)
    return NoiseSchedule(betas=betas)


def q_sample(x0: np.ndarray, t: int, eps: np.ndarray, schedule: NoiseSchedule) -> LatentState:
    """Forward-noise clean data to step t: a_t * x0 + s_t * eps."""
    x0 = np.asarray(x0, dtype=np.float64)
    eps = np.asarray(eps, dtype=np.float64)
    if x0.shape != eps.shape:
        raise ShapeError(f"eps shape {eps.shape} != x0 shape {x0.shape}")
    t = schedule._check_step(t)
    return LatentState(x=schedule.a(t) * x0 + schedule.s(t) * eps, t=t)


def x0_to_eps(x_t: LatentState, x0_hat: np.ndarray, schedule: NoiseSchedule) -> np.ndarray:
    """Recover the implied noise from a clean-data prediction.

    Inverts the forward formula: eps = (x_t - a_t * x0_hat) / s_t.
    """
    x0_hat = np.asarray(x0_hat, dtype=np.float64)
    if x0_hat.shape != x_t.x.shape:
        raise ShapeError(f"x0_hat shape {x0_hat.shape} != state shape {x_t.x.shape}")
    s_t = schedule.s(x_t.t)
    if s_t == 0.0:
        raise SingularityError(f"no noise added at step {x_t.t}; eps is undefined")
    return (x_t.x - schedule.a(x_t.t) * x0_hat) / s_t


def ancestral_step(
    x_t: LatentState,
    x0_hat: np.ndarray,
    schedule: NoiseSchedule,
    z: np.ndarray | None = None,
    sigma_mode: str = "zero_at_last",
) -> LatentState:
    """One stochastic reverse step from t to t-1.

    ``sigma_mode`` is "beta" (sigma_t = sqrt(beta_t) always) or
    "zero_at_last" (additionally sigma_1 = 0 so the chain ends
    deterministically). ``z`` is ignored when sigma_t == 0.
    """
    t = x_t.t
    if t < 1:
        raise StepRangeError(f"ancestral step requires t >= 1, got {t}")
    if sigma_mode not in ("beta", "zero_at_last"):
        raise ConfigError(f"unknown sigma_mode {sigma_mode!r}")
    eps_hat = x0_to_eps(x_t, x0_hat, schedule)
    alpha_t = schedule.alpha(t)
    mean = (x_t.x - ((1.0 - alpha_t) / schedule.s(t)) * eps_hat) / np.sqrt(alpha_t)
    sigma = np.sqrt(schedule.beta(t))
    if sigma_mode == "zero_at_last" and t == 1:
        sigma = 0.0
    if sigma > 0.0:
        if z is None:
            raise ShapeError("z is required when sigma_t > 0")
        z = np.asarray(z, dtype=np.float64)
        if z.shape != x_t.x.shape:
            raise ShapeError(f"z shape {z.shape} != state shape {x_t.x.shape}")
        mean = mean + sigma * z
    return LatentState(x=mean, t=t - 1)
