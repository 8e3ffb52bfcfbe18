"""Configuration loading and validation for budgetsvm."""

import os
import sys
from dataclasses import dataclass, field, replace
from enum import Enum
from pathlib import Path
from typing import Any

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from budgetsvm.models import KernelKind, KernelSpec

THREADS_ENV = "BUDGETSVM_THREADS"


class Algorithm(Enum):
    """Training algorithms."""

    BSCA = "bsca"
    BSGD = "bsgd"
    SCA = "sca"
    SGD = "sgd"

    @property
    def is_dual(self) -> bool:
        """Coordinate ascent on the dual (as opposed to primal SGD)."""
        return self in (Algorithm.BSCA, Algorithm.SCA)

    @property
    def is_budgeted(self) -> bool:
        return self in (Algorithm.BSCA, Algorithm.BSGD)


class ConfigError(Exception):
    """Configuration error."""

    pass


@dataclass(frozen=True)
class TrainConfig:
    """Settings for one training run."""

    algo: Algorithm = Algorithm.BSCA
    C: float = 1.0
    kernel: KernelSpec = field(default_factory=lambda: KernelSpec.gaussian(1.0))
    budget: int = 500  # ignored by the exact solvers
    epochs: int = 10
    seed: int = 1
    coalesce: bool = True
    log_every: int = 1  # epochs between diagnostic rows
    maintenance: str = "merge"  # merge | remove
    wall_time: bool = True

    def __post_init__(self) -> None:
        validate_train_config(self)

    @property
    def capacity(self) -> int | None:
        """Model capacity: the budget for budgeted solvers, unbounded otherwise."""
        return self.budget if self.algo.is_budgeted else None

    def with_overrides(self, **changes: Any) -> "TrainConfig":
        """Copy with some fields replaced (re-validated)."""
        return replace(self, **changes)


@dataclass(frozen=True)
class SweepConfig:
    """Budget sweep settings."""

    budgets: tuple[int, ...] = (200, 500, 1000)
    threads: int | None = None  # None: one worker per CPU


@dataclass(frozen=True)
class Settings:
    """Main configuration container."""

    train: TrainConfig = field(default_factory=TrainConfig)
    sweep: SweepConfig = field(default_factory=SweepConfig)


def validate_train_config(config: TrainConfig) -> None:
    """Raise ConfigError if the settings are out of range."""
    if not config.C > 0:
        raise ConfigError(f"C must be positive, got {config.C}")
    if config.budget < 2:
        raise ConfigError(f"Budget must be at least 2, got {config.budget}")
    if config.epochs < 1:
        raise ConfigError(f"Epochs must be at least 1, got {config.epochs}")
    if config.log_every < 1:
        raise ConfigError(f"log_every must be at least 1, got {config.log_every}")
    if not 0 <= config.seed < 2**64:
        raise ConfigError(f"Seed must be a 64-bit unsigned integer, got {config.seed}")
    if config.maintenance not in ("merge", "remove"):
        raise ConfigError(
            f"Maintenance must be 'merge' or 'remove', got '{config.maintenance}'"
        )


def parse_algorithm(name: str) -> Algorithm:
    try:
        return Algorithm(name.lower())
    except ValueError:
        choices = ", ".join(a.value for a in Algorithm)
        raise ConfigError(f"Unknown algo '{name}' (expected one of: {choices})")


def build_kernel(kind: str, gamma: float) -> KernelSpec:
    try:
        return KernelSpec(KernelKind.from_name(kind), float(gamma))
    except ValueError as e:
        raise ConfigError(str(e))


def _train_from_table(data: dict[str, Any]) -> TrainConfig:
    defaults = TrainConfig()
    kernel = build_kernel(
        data.get("kernel", defaults.kernel.kind.value),
        data.get("gamma", defaults.kernel.gamma),
    )
    try:
        return TrainConfig(
            algo=parse_algorithm(data.get("algo", defaults.algo.value)),
            C=float(data.get("c", defaults.C)),
            kernel=kernel,
            budget=int(data.get("budget", defaults.budget)),
            epochs=int(data.get("epochs", defaults.epochs)),
            seed=int(data.get("seed", defaults.seed)),
            coalesce=bool(data.get("coalesce", defaults.coalesce)),
            log_every=int(data.get("log_every", defaults.log_every)),
            maintenance=str(data.get("maintenance", defaults.maintenance)),
            wall_time=bool(data.get("wall_time", defaults.wall_time)),
        )
    except (TypeError, ValueError) as e:
        raise ConfigError(f"Invalid value in [train] section: {e}")


def _sweep_from_table(data: dict[str, Any]) -> SweepConfig:
    budgets = data.get("budgets", list(SweepConfig().budgets))
    if not isinstance(budgets, list) or not all(isinstance(b, int) for b in budgets):
        raise ConfigError("'budgets' in [sweep] section must be a list of integers")
    threads = data.get("threads")
    if threads is not None and (not isinstance(threads, int) or threads < 1):
        raise ConfigError("'threads' in [sweep] section must be a positive integer")
    return SweepConfig(budgets=tuple(budgets), threads=threads)


def load_config(config_path: str | Path) -> Settings:
    """Load and validate configuration from TOML file.

    Args:
        config_path: Path to the configuration file

    Returns:
        Validated Settings object

    Raises:
        ConfigError: If configuration is invalid
    """
    path = Path(config_path)

    if not path.exists():
        raise ConfigError(f"Configuration file not found: {path}")

    try:
        with open(path, "rb") as f:
            data = tomllib.load(f)
    except tomllib.TOMLDecodeError as e:
        raise ConfigError(f"Invalid TOML in configuration file: {e}")

    return Settings(
        train=_train_from_table(data.get("train", {})),
        sweep=_sweep_from_table(data.get("sweep", {})),
    )


def get_default_config_path() -> Path | None:
    """Get the default configuration file path, if one exists.

    Searches in order:
    1. ./budgetsvm.toml
    2. ~/.config/budgetsvm/config.toml
    """
    local_config = Path("./budgetsvm.toml")
    if local_config.exists():
        return local_config

    user_config = Path.home() / ".config" / "budgetsvm" / "config.toml"
    if user_config.exists():
        return user_config

    return None


def sweep_threads(sweep: SweepConfig) -> int:
    """Worker count for sweeps: BUDGETSVM_THREADS, then the config, then CPUs."""
    env = os.environ.get(THREADS_ENV)
    if env:
        try:
            value = int(env)
        except ValueError:
            raise ConfigError(f"{THREADS_ENV} must be an integer, got '{env}'")
        if value < 1:
            raise ConfigError(f"{THREADS_ENV} must be at least 1, got {value}")
        return value
    if sweep.threads is not None:
        return sweep.threads
    return os.cpu_count() or 1
