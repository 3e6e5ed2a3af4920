"""Optimizer configuration with the published default schedule."""

from __future__ import annotations

from dataclasses import asdict, dataclass, replace


@dataclass(frozen=True)
class OptimizerConfig:
    """Weights and schedule for the two-stage grasp optimization.

    Defaults: loss weights 1.5 / 3 / 0.1 / 1, learning rate 0.003 decaying
    by 10% every 100 steps for 500 refinement steps, 300 finger pre-grasp
    iterations, and a fingertip coefficient that switches from -1 to +1 at
    step 100.
    """

    alpha: float = 1.5  # dual penetration weight
    beta: float = 3.0  # contact weight
    gamma: float = 0.1  # dynamic fingertip weight
    delta: float = 1.0  # direction control weight
    dynamic_magnitude: float = 1.0  # |k|
    sign_flip_step: int = 100
    refinement_steps: int = 500
    pregrasp_iterations: int = 300
    learning_rate: float = 0.003
    decay_factor: float = 0.9
    decay_interval: int = 100
    adam_beta1: float = 0.9
    adam_beta2: float = 0.999
    adam_eps: float = 1e-8
    standoff_clearance: float = 0.08  # meters
    contact_threshold: float = 0.003  # meters, for contact counting
    contact_all_vertices: bool = False  # use every hand vertex in the contact term

    def __post_init__(self):
        if min(self.alpha, self.beta, self.gamma, self.delta) < 0:
            raise ValueError("loss weights must be non-negative")
        if self.refinement_steps <= 0 or self.pregrasp_iterations < 0:
            raise ValueError("step counts must be positive")
        if self.learning_rate <= 0:
            raise ValueError("learning rate must be positive")
        if not 0 < self.decay_factor <= 1:
            raise ValueError("decay factor must lie in (0, 1]")
        if self.decay_interval <= 0:
            raise ValueError("decay interval must be positive")
        if self.standoff_clearance <= 0:
            raise ValueError("standoff clearance must be positive")

    def learning_rate_at(self, step: int) -> float:
        return self.learning_rate * self.decay_factor ** (step // self.decay_interval)

    def fingertip_coefficient(self, step: int) -> float:
        return self.dynamic_magnitude if step >= self.sign_flip_step else -self.dynamic_magnitude

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "OptimizerConfig":
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown optimizer config keys: {sorted(unknown)}")
        return replace(cls(), **data)
