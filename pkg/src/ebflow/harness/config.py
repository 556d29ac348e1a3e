"""Run configuration: flat ``key = value`` files with ``#`` comments."""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from pathlib import Path

from ..errors import ConfigError
from ..ns.params import SCHEMES, FluidParams, TimeStepConfig

SCENARIOS = ("elliptic_cyl_convergence", "elliptic_cart_manufactured", "bubble2d",
             "laplace_droplet", "geometry_check")

TIME_DEPENDENT = ("bubble2d",)

DEFAULT_MESHES = {
    "elliptic_cyl_convergence": (10, 20, 40),
    "elliptic_cart_manufactured": (16, 32, 64),
    "bubble2d": (20, 40, 80),
    "laplace_droplet": (40, 80, 160),
    "geometry_check": (16, 32, 64, 128),
}


@dataclass
class RunConfig:
    scenario: str = "bubble2d"
    meshes: tuple = ()
    # fluid
    rho_a: float = 1.0
    rho_b: float = 0.05
    mu_a: float = 5e-4
    mu_b: float = 2.5e-7
    sigma: float = 0.5
    gravity: tuple = (0.0, 0.0)
    # time stepping
    cfl: float = 0.5
    dt_max: float = 1e-2
    scheme: str = "pm2_cn"
    diffusion_tol: float = 1e-10
    projection_tol: float = 1e-10
    projection_solver: str = "direct"
    t_end: float = 9.0
    # droplet shape (2D scenarios)
    radius: float = 0.8
    epsilon: float = 0.05
    mode: int = 2
    domain: tuple = (0.0, 2.0)
    # elliptic scenarios
    elliptic_solver: str = "gmres"
    elliptic_tol: float = 1e-10
    dirichlet_order: int = 1
    # output
    output_dir: str = "out"
    frame_every: int = 0

    def __post_init__(self):
        self.meshes = tuple(int(m) for m in (self.meshes or DEFAULT_MESHES.get(self.scenario, ())))
        self.gravity = tuple(float(g) for g in self.gravity)
        self.domain = tuple(float(d) for d in self.domain)
        self.validate()

    def validate(self) -> None:
        if self.scenario not in SCENARIOS:
            raise ConfigError(f"unknown scenario {self.scenario!r}; expected one of {SCENARIOS}")
        if not self.meshes:
            raise ConfigError("at least one mesh size is required")
        if any(m <= 0 for m in self.meshes):
            raise ConfigError("mesh sizes must be positive")
        if any(b <= a for a, b in zip(self.meshes, self.meshes[1:])):
            raise ConfigError("mesh sizes must be strictly increasing")
        if self.scenario in TIME_DEPENDENT and not self.t_end > 0:
            raise ConfigError("t_end must be positive for time-dependent scenarios")
        if self.scheme not in SCHEMES:
            raise ConfigError(f"scheme must be one of {SCHEMES}")
        if self.elliptic_solver not in ("gmres", "direct") or self.projection_solver not in ("gmres", "direct"):
            raise ConfigError("solvers must be 'gmres' or 'direct'")
        if self.dirichlet_order not in (1, 2):
            raise ConfigError("dirichlet_order must be 1 or 2")
        if len(self.gravity) != 2 or len(self.domain) != 2 or self.domain[1] <= self.domain[0]:
            raise ConfigError("gravity needs two components and domain must be 'lower, upper'")
        try:
            self.fluid()
            self.timestep()
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    def fluid(self) -> FluidParams:
        return FluidParams(self.rho_a, self.rho_b, self.mu_a, self.mu_b, self.sigma, self.gravity)

    def timestep(self) -> TimeStepConfig:
        return TimeStepConfig(cfl=self.cfl, dt_max=self.dt_max, scheme=self.scheme,
                              diffusion_tol=self.diffusion_tol, projection_tol=self.projection_tol,
                              projection_solver=self.projection_solver)

    def with_updates(self, **kw) -> "RunConfig":
        return dataclasses.replace(self, **kw)


def _convert(name: str, raw: str, default):
    try:
        if isinstance(default, tuple):
            parts = [p.strip() for p in raw.split(",") if p.strip()]
            if name == "meshes":
                return tuple(int(p) for p in parts)
            return tuple(float(p) for p in parts)
        if isinstance(default, bool):
            if raw.lower() in ("1", "true", "yes", "on"):
                return True
            if raw.lower() in ("0", "false", "no", "off"):
                return False
            raise ValueError(raw)
        if isinstance(default, int):
            return int(raw)
        if isinstance(default, float):
            return float(raw)
        return raw
    except ValueError as exc:
        raise ConfigError(f"bad value for {name}: {raw!r}") from exc


def parse_config(text: str, **overrides) -> RunConfig:
    """Parse config text; unknown keys and malformed lines raise ConfigError."""
    defaults = {f.name: f.default for f in dataclasses.fields(RunConfig)}
    values = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value'")
        key, raw = (s.strip() for s in line.split("=", 1))
        if key not in defaults:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in values:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        values[key] = _convert(key, raw, defaults[key])
    values.update({k: v for k, v in overrides.items() if v is not None})
    return RunConfig(**values)


def load_config(path, **overrides) -> RunConfig:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return parse_config(text, **overrides)
