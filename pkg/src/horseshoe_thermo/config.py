"""Flat key=value configuration with dotted sections, CLI-overridable."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from .errors import ConfigError
from .maps import Parameters
from .transfer import Potential, check_variation

DEFAULT_TOLERANCES = {
    "power_iteration": 1e-14,
    "eigen_agreement": 1e-10,
    "jacobian_partition": 1e-10,
    "semiconjugacy": 1e-12,
    "lift_integral": 1e-6,
    "pressure_identity": 1e-2,
    "pressure_identity_nonconstant": 3e-2,
    "scaling_law": 1e-12,
    "golden_ratio": 1e-9,
    "entropy_growth": 1e-3,
}


@dataclass
class Config:
    parameters: Parameters = field(default_factory=Parameters)
    potential_family: str = "constant"
    potential_params: tuple = (0.0,)
    depth: int = 12
    n_max: int = 10
    seed: int = 20260810
    output_dir: str = "out"
    threads: int = 1
    tolerances: dict = field(default_factory=lambda: dict(DEFAULT_TOLERANCES))
    sabotage: str = ""

    def potential(self) -> Potential:
        fam = self.potential_family
        if fam == "constant":
            return Potential.constant(*self.potential_params)
        if fam == "affine_in_y":
            return Potential.affine_in_y(*self.potential_params)
        if fam == "center_log_derivative":
            return Potential.center_log_derivative(
                self.potential_params[0], self.parameters.sigma
            )
        raise ConfigError(f"unknown potential family {fam!r}")

    def validate(self) -> None:
        phi = self.potential()
        if not check_variation(phi):
            from .transfer import VARIATION_THRESHOLD

            raise ConfigError(
                f"potential variation {phi.variation:.7f} is not below the "
                f"admissible bound log(omega)/2 = {VARIATION_THRESHOLD:.7f}"
            )
        if self.depth < 2:
            raise ConfigError(f"depth must be >= 2, got {self.depth}")
        if self.n_max < 1:
            raise ConfigError(f"n_max must be >= 1, got {self.n_max}")

    def echo(self) -> dict:
        return {
            "parameters": {
                "rho": self.parameters.rho,
                "sigma": self.parameters.sigma,
                "beta": self.parameters.beta,
                "beta1": self.parameters.beta1,
            },
            "potential": {
                "family": self.potential_family,
                "params": list(self.potential_params),
            },
            "depth": self.depth,
            "n_max": self.n_max,
            "seed": self.seed,
            "threads": self.threads,
        }


def _parse_value(raw: str):
    raw = raw.strip()
    if raw.lower() in ("true", "false"):
        return raw.lower() == "true"
    try:
        return int(raw)
    except ValueError:
        pass
    try:
        return float(raw)
    except ValueError:
        return raw


def parse_config_text(text: str) -> dict:
    """key = value lines with dotted sections; '#' starts a comment."""
    out = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigError(f"line {lineno}: expected key = value, got {line!r}")
        key, _, raw = stripped.partition("=")
        out[key.strip()] = _parse_value(raw)
    return out


def load_config(path: str | Path | None = None, overrides: dict | None = None) -> Config:
    """Build a validated Config from a file plus flag overrides."""
    kv = {}
    if path is not None:
        kv.update(parse_config_text(Path(path).read_text()))
    if overrides:
        kv.update({k: v for k, v in overrides.items() if v is not None})
    params_kwargs = {}
    for name in ("rho", "sigma", "beta", "beta1"):
        key = f"parameters.{name}"
        if key in kv:
            params_kwargs[name] = float(kv.pop(key))
    try:
        parameters = Parameters(**params_kwargs)
    except Exception as exc:
        raise ConfigError(str(exc)) from exc
    cfg = Config(parameters=parameters)
    if "potential.family" in kv:
        cfg.potential_family = str(kv.pop("potential.family"))
    pot_params = []
    for i in range(4):
        key = f"potential.params.{i}"
        if key in kv:
            pot_params.append(float(kv.pop(key)))
    if pot_params:
        cfg.potential_params = tuple(pot_params)
    for key, attr in (
        ("depth", "depth"),
        ("n_max", "n_max"),
        ("seed", "seed"),
        ("threads", "threads"),
    ):
        if key in kv:
            setattr(cfg, attr, int(kv.pop(key)))
    if "output_dir" in kv:
        cfg.output_dir = str(kv.pop("output_dir"))
    if "debug.sabotage" in kv:
        cfg.sabotage = str(kv.pop("debug.sabotage"))
    for key in list(kv):
        if key.startswith("tolerances."):
            cfg.tolerances[key.split(".", 1)[1]] = float(kv.pop(key))
    if kv:
        raise ConfigError(f"unknown config keys: {sorted(kv)}")
    cfg.validate()
    return cfg
