"""Material constants, time-stepping options and the additive RK tableau."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class FluidParams:
    """Per-component constants; component 0 is the droplet."""

    rho_a: float = 1.0
    rho_b: float = 1.0
    mu_a: float = 0.0
    mu_b: float = 0.0
    sigma: float = 0.0
    gravity: tuple = (0.0, 0.0)

    def __post_init__(self):
        if self.rho_a <= 0 or self.rho_b <= 0:
            raise ValueError("densities must be positive")
        if self.mu_a < 0 or self.mu_b < 0:
            raise ValueError("viscosities must be non-negative")
        if self.sigma < 0:
            raise ValueError("sigma must be non-negative")

    @property
    def rho(self) -> np.ndarray:
        return np.array([self.rho_a, self.rho_b])

    @property
    def mu(self) -> np.ndarray:
        return np.array([self.mu_a, self.mu_b])

    @property
    def beta(self) -> tuple:
        return (1.0 / self.rho_a, 1.0 / self.rho_b)

    @property
    def rho_mean(self) -> float:
        return 0.5 * (self.rho_a + self.rho_b)


@dataclass(frozen=True)
class ARKTableau:
    """Additive RK coefficients: ``a`` implicit, ``b`` explicit, nodes ``c``."""

    a: np.ndarray
    b: np.ndarray
    c: np.ndarray

    def __post_init__(self):
        a, b, c = (np.asarray(v, dtype=float) for v in (self.a, self.b, self.c))
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "c", c)
        if not (np.allclose(a.sum(axis=1), c, atol=1e-14) and np.allclose(b.sum(axis=1), c, atol=1e-14)):
            raise ValueError("tableau rows must sum to the nodes c")

    @property
    def stages(self) -> int:
        return len(self.c)

    @classmethod
    def l_stable_two_stage(cls) -> "ARKTableau":
        s2 = math.sqrt(2.0)
        a = [[0.0, 0.0, 0.0],
             [0.5 * (s2 - 1.0), 1.0 - s2 / 2.0, 0.0],
             [1.0 - s2 / 2.0, s2 - 1.0, 1.0 - s2 / 2.0]]
        b = [[0.0, 0.0, 0.0],
             [0.5, 0.0, 0.0],
             [0.0, 1.0, 0.0]]
        return cls(np.array(a), np.array(b), np.array([0.0, 0.5, 1.0]))


SCHEMES = ("pm1_cn", "pm2_cn", "pm2_ark2")


@dataclass(frozen=True)
class TimeStepConfig:
    cfl: float = 0.5
    dt_max: float = 1e-2
    scheme: str = "pm2_cn"
    diffusion_tol: float = 1e-10
    projection_tol: float = 1e-10
    projection_solver: str = "direct"
    tableau: ARKTableau = field(default_factory=ARKTableau.l_stable_two_stage)

    def __post_init__(self):
        if not 0.0 < self.cfl <= 1.0:
            raise ValueError("cfl must lie in (0, 1]")
        if self.dt_max <= 0:
            raise ValueError("dt_max must be positive")
        if self.scheme not in SCHEMES:
            raise ValueError(f"scheme must be one of {SCHEMES}")


@dataclass(frozen=True)
class FlowBC:
    """Velocity condition per axis: ``noslip`` walls or ``periodic``."""

    kinds: tuple = ("noslip", "noslip")

    def __post_init__(self):
        for k in self.kinds:
            if k not in ("noslip", "periodic"):
                raise ValueError(f"unknown velocity boundary condition {k!r}")

    def periodic(self, axis: int) -> bool:
        return self.kinds[axis] == "periodic"
