"""Run configuration: resource caps, precision, output options.

Precedence for the CLI: built-in defaults < config file (key=value lines)
< DIVLAB_* environment variables < command-line flags.
"""

from __future__ import annotations

import dataclasses
import os
from dataclasses import dataclass
from typing import Optional

from .errors import DomainError

ENV_PREFIX = "DIVLAB_"


@dataclass(frozen=True)
class Caps:
    """Resource limits shared by the solver modules."""

    prime_cap: int = 10**9
    scan_cap: int = 10**8
    exponent_cap: int = 10**4

    def __post_init__(self):
        if min(self.prime_cap, self.scan_cap, self.exponent_cap) <= 0:
            raise DomainError("all caps must be positive")


DEFAULT_CAPS = Caps()


@dataclass(frozen=True)
class RunConfig:
    precision_bits: int = 128
    prime_cap: int = 10**9
    scan_cap: int = 10**8
    exponent_cap: int = 10**4
    output_format: str = "csv"
    output_path: Optional[str] = None
    seed: int = 0
    threads: int = 0  # 0 = machine parallelism

    def __post_init__(self):
        if self.precision_bits < 64:
            raise DomainError("precision_bits must be >= 64")
        if min(self.prime_cap, self.scan_cap, self.exponent_cap) <= 0:
            raise DomainError("all caps must be positive")
        if self.output_format not in ("csv", "json", "text"):
            raise DomainError(f"unknown output format {self.output_format!r}")

    @property
    def caps(self) -> Caps:
        return Caps(
            prime_cap=self.prime_cap,
            scan_cap=self.scan_cap,
            exponent_cap=self.exponent_cap,
        )

    def effective_threads(self) -> int:
        if self.threads > 0:
            return self.threads
        return os.cpu_count() or 1


_INT_FIELDS = {
    "precision_bits",
    "prime_cap",
    "scan_cap",
    "exponent_cap",
    "seed",
    "threads",
}


def _parse_value(key: str, raw: str):
    raw = raw.strip()
    if key in _INT_FIELDS:
        try:
            return int(float(raw)) if ("e" in raw or "E" in raw) else int(raw)
        except ValueError as exc:
            raise DomainError(f"config field {key}: bad integer {raw!r}") from exc
    return raw


def load_config(
    path: Optional[str] = None,
    env: Optional[dict] = None,
    overrides: Optional[dict] = None,
) -> RunConfig:
    """Merge defaults, a key=value config file, DIVLAB_* env vars and
    explicit overrides (in that order)."""
    values = {}
    names = {f.name for f in dataclasses.fields(RunConfig)}
    if path:
        try:
            with open(path, "r", encoding="utf-8") as fh:
                for line_no, line in enumerate(fh, 1):
                    line = line.strip()
                    if not line or line.startswith("#"):
                        continue
                    if "=" not in line:
                        raise DomainError(
                            f"{path}:{line_no}: expected key=value"
                        )
                    key, _, raw = line.partition("=")
                    key = key.strip().lower()
                    if key not in names:
                        raise DomainError(f"{path}:{line_no}: unknown key {key!r}")
                    values[key] = _parse_value(key, raw)
        except OSError as exc:
            raise DomainError(f"cannot read config file {path}: {exc}") from exc
    env = os.environ if env is None else env
    for name in names:
        raw = env.get(ENV_PREFIX + name.upper())
        if raw is not None:
            values[name] = _parse_value(name, raw)
    for key, val in (overrides or {}).items():
        if val is not None:
            values[key] = val
    return RunConfig(**values)
