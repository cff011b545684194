"""Run configuration: one JSON document, overridable from the command line."""
from __future__ import annotations

import json
import math
import os
from dataclasses import asdict, dataclass, fields
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

from ..errors import ConfigError, VortexError
from ..lattice import GridShape, VortexSpec

OUT_ENV = "DNLSVORTEX_OUT"
EMIT_CHOICES = ("csv", "json", "svg")
CHARGES = {"++": (1, 1), "+-": (1, -1)}


@dataclass(frozen=True)
class RunConfig:
    model: str = "scalar"
    charges: str = "++"
    beta: float = 0.0
    omega: float = 1.0
    delta: Optional[float] = None
    coupling: str = "hop"
    grid_n: int = 10
    eps_start: float = 0.0
    eps_stop: float = 0.1
    eps_step: float = 0.01
    out: str = "runs/default"
    emit: Tuple[str, ...] = ("csv", "json")
    seed_order: Optional[int] = None
    newton_tol: float = 1e-10
    max_iters: int = 50
    min_step: float = 1e-4
    hh_tol: float = 1e-6
    workers: int = 1

    def __post_init__(self):
        emit = tuple(self.emit)
        bad = [e for e in emit if e not in EMIT_CHOICES]
        if bad:
            raise ConfigError(f"unknown emit flags {bad}; choose from {EMIT_CHOICES}")
        object.__setattr__(self, "emit", tuple(e for e in EMIT_CHOICES if e in emit))
        if self.charges not in CHARGES:
            raise ConfigError(f"charges must be '++' or '+-', got {self.charges!r}")
        if not self.eps_step > 0:
            raise ConfigError("eps_step must be positive")
        if self.eps_start < 0 or self.eps_stop < self.eps_start:
            raise ConfigError("eps grid must satisfy 0 <= eps_start <= eps_stop")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")
        try:
            self.spec()
        except (VortexError, ValueError) as exc:
            raise ConfigError(str(exc)) from exc

    @property
    def charge_pair(self) -> Tuple[int, int]:
        return CHARGES[self.charges]

    def spec(self, epsilon: float = 0.0) -> VortexSpec:
        return VortexSpec(self.model, self.charge_pair if self.model == "vector" else None,
                          self.beta, self.omega, self.delta, epsilon, GridShape(self.grid_n),
                          self.coupling)

    def eps_grid(self) -> List[float]:
        """start, start + step, ..., stop (stop always included)."""
        n = int(math.floor((self.eps_stop - self.eps_start) / self.eps_step + 1e-9))
        pts = [round(self.eps_start + k * self.eps_step, 12) for k in range(n + 1)]
        if self.eps_stop - pts[-1] > 1e-12:
            pts.append(self.eps_stop)
        return pts

    def to_dict(self) -> Dict[str, Any]:
        d = asdict(self)
        d["emit"] = list(self.emit)
        return d

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "RunConfig":
        known = {f.name for f in fields(cls)}
        extra = set(data) - known
        if extra:
            raise ConfigError(f"unknown config keys: {sorted(extra)}")
        data = dict(data)
        if "emit" in data:
            data["emit"] = tuple(data["emit"])
        return cls(**data)

    @classmethod
    def loads(cls, text: str) -> "RunConfig":
        try:
            return cls.from_dict(json.loads(text))
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}") from exc

    def out_dir(self) -> Path:
        p = Path(self.out)
        root = os.environ.get(OUT_ENV)
        if root and not p.is_absolute():
            return Path(root) / p
        return p


def load_config(path: Optional[str], overrides: Dict[str, Any]) -> RunConfig:
    """File values first, then non-None overrides."""
    base: Dict[str, Any] = {}
    if path:
        try:
            base = json.loads(Path(path).read_text())
        except FileNotFoundError as exc:
            raise ConfigError(f"config file not found: {path}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}") from exc
    base.update({k: v for k, v in overrides.items() if v is not None})
    return RunConfig.from_dict(base)
