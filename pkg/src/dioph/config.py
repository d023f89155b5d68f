"""Experiment configuration stored as TOML."""

from __future__ import annotations

from dataclasses import asdict, dataclass, field

import tomli_w

try:
    import tomllib as tomli
except ModuleNotFoundError:      # Python < 3.11
    import tomli

from .errors import ConfigInvalid

_TOP = ("command", "seed", "out", "cache", "threads", "params", "precision", "tolerances")


@dataclass
class ExperimentConfig:
    command: str
    params: dict = field(default_factory=dict)
    seed: int = 0
    out: str = "results"
    cache: str = ""
    threads: int = 1
    precision: dict = field(default_factory=dict)
    tolerances: dict = field(default_factory=dict)

    def __post_init__(self):
        from .experiments import COMMANDS, merge_params
        if self.command not in COMMANDS:
            raise ConfigInvalid(f"unknown command {self.command!r}")
        if isinstance(self.seed, bool) or not isinstance(self.seed, int) or self.seed < 0:
            raise ConfigInvalid("seed must be a non-negative integer")
        if isinstance(self.threads, bool) or not isinstance(self.threads, int) or self.threads < 1:
            raise ConfigInvalid("threads must be a positive integer")
        for name in ("params", "precision", "tolerances"):
            if not isinstance(getattr(self, name), dict):
                raise ConfigInvalid(f"{name} must be a table")
        merge_params(self.command, {**self.params, **self.tolerances})

    def resolved_params(self) -> dict:
        """Command defaults with ``params`` and then ``tolerances`` overlaid."""
        from .experiments import merge_params
        return merge_params(self.command, {**self.params, **self.tolerances})

    def as_dict(self) -> dict:
        return asdict(self)


def dumps(cfg: ExperimentConfig) -> str:
    return tomli_w.dumps(cfg.as_dict())


def loads(text: str) -> ExperimentConfig:
    try:
        raw = tomli.loads(text)
    except tomli.TOMLDecodeError as e:
        raise ConfigInvalid(f"config is not valid TOML: {e}") from None
    extra = set(raw) - set(_TOP)
    if extra:
        raise ConfigInvalid(f"unknown top-level keys: {sorted(extra)}")
    if "command" not in raw:
        raise ConfigInvalid("config needs a command")
    return ExperimentConfig(**raw)


def load(path) -> ExperimentConfig:
    with open(path, "rb") as fh:
        try:
            return loads(fh.read().decode())
        except UnicodeDecodeError:
            raise ConfigInvalid("config must be UTF-8 text") from None


def default_config(command: str) -> ExperimentConfig:
    return ExperimentConfig(command)
