"""Configuration management for solver tolerances and size guards."""

import os
from dataclasses import dataclass, fields, replace
from typing import Any

try:
    from dotenv import load_dotenv

    load_dotenv()  # Load .env file if it exists
except ImportError:
    pass  # dotenv is optional

from .exceptions import InputError


@dataclass(frozen=True)
class SolverConfig:
    """
    Numeric knobs every verdict depends on.

    Design: the field defaults below are the single source of truth. Each one
    can be overridden through the environment variable listed in ENV_VARS,
    and the CLI layers its flags on top with with_overrides().
    """

    feasibility_tolerance: float = 1e-9
    optimality_tolerance: float = 1e-8
    comparison_tolerance: float = 1e-12
    vertex_merge_tolerance: float = 1e-7
    max_enumeration_states: int = 8
    max_enumeration_constraints: int = 24
    burn_in: int = 100
    workers: int = 1

    ENV_VARS = {
        "feasibility_tolerance": "MTDOM_EPSILON_FEAS",
        "optimality_tolerance": "MTDOM_EPSILON_OPT",
        "comparison_tolerance": "MTDOM_EPSILON_CMP",
        "vertex_merge_tolerance": "MTDOM_VERTEX_MERGE",
        "max_enumeration_states": "MTDOM_MAX_STATES",
        "max_enumeration_constraints": "MTDOM_MAX_CONSTRAINTS",
        "burn_in": "MTDOM_BURN_IN",
        "workers": "MTDOM_WORKERS",
    }

    def __post_init__(self):
        for name in (
            "feasibility_tolerance",
            "optimality_tolerance",
            "comparison_tolerance",
            "vertex_merge_tolerance",
        ):
            if getattr(self, name) < 0:
                raise InputError(f"{name} must be non-negative")
        if self.max_enumeration_states < 1 or self.max_enumeration_constraints < 0:
            raise InputError("enumeration guards must be positive")
        if self.burn_in < 0:
            raise InputError("burn_in must be non-negative")
        if self.workers < 1:
            raise InputError("workers must be at least 1")

    @classmethod
    def from_env(cls) -> "SolverConfig":
        """Build a config from the defaults plus any environment overrides."""
        overrides: dict[str, Any] = {}
        for field in fields(cls):
            env_value = os.getenv(cls.ENV_VARS[field.name])
            if env_value is None or env_value == "":
                continue
            caster = int if field.type in (int, "int") else float
            try:
                overrides[field.name] = caster(env_value)
            except ValueError:
                raise InputError(
                    f"{cls.ENV_VARS[field.name]}={env_value!r} is not a valid {caster.__name__}"
                )
        return cls(**overrides)

    def with_overrides(self, **overrides: Any) -> "SolverConfig":
        """Return a copy with the given (non-None) fields replaced."""
        return replace(self, **{k: v for k, v in overrides.items() if v is not None})


def resolve_config(config: "SolverConfig | None") -> SolverConfig:
    """Fall back to the environment-derived config when none is given."""
    return config if config is not None else SolverConfig.from_env()
