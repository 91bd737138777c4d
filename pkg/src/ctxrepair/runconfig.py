"""Run configuration: file values, flag overrides, paper-default fallbacks.

Precedence is flags > config file > built-in defaults.  The effective values
are echoed into each run summary so any run can be reproduced from its
output directory alone.  Unknown keys are rejected outright.
"""

from __future__ import annotations

import json
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional

if sys.version_info >= (3, 11):
    import tomllib
else:  # pragma: no cover - version-dependent import
    import tomli as tomllib

from .errors import ConfigError
from .gateway.config import GenerationConfig
from .loop.models import LoopConfig

_KNOWN_KEYS: dict[str, set[str]] = {
    "paths": {"project_root", "database", "tasks", "output_dir"},
    "generation": {
        "temperature",
        "top_k",
        "n_samples",
        "max_new_tokens",
        "prompt_char_budget",
    },
    "loop": {
        "max_iterations",
        "n_candidates",
        "retrieval_n",
        "checker",
        "fallback_to_builtin",
        "test_timeout",
    },
    "backend": {"kind", "endpoint", "model"},
    "embedder": {"kind", "dim", "seed", "endpoint", "model"},
}


def load_config_file(path: str | Path) -> dict[str, dict[str, Any]]:
    """Parse a TOML or JSON config document and validate its key set."""
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    if path.suffix.lower() == ".json":
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    else:
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
    if not isinstance(data, dict):
        raise ConfigError(f"config root must be a table/object: {path}")

    for section, values in data.items():
        if section not in _KNOWN_KEYS:
            raise ConfigError(f"unknown config section {section!r} in {path}")
        if not isinstance(values, dict):
            raise ConfigError(f"config section {section!r} must be a table/object")
        unknown = set(values) - _KNOWN_KEYS[section]
        if unknown:
            raise ConfigError(
                f"unknown key(s) in [{section}]: {', '.join(sorted(unknown))}"
            )
    return data


@dataclass
class RunConfig:
    """Everything a run needs, with the paper's defaults baked in."""

    project_root: Optional[str] = None
    database: Optional[str] = None
    tasks: Optional[str] = None
    output_dir: str = "out"
    generation: GenerationConfig = field(default_factory=GenerationConfig)
    loop: LoopConfig = field(default_factory=LoopConfig)
    backend_kind: str = "remote"
    backend_endpoint: Optional[str] = None
    backend_model: Optional[str] = None
    embedder_kind: str = "local"
    embedder_dim: Optional[int] = None
    embedder_seed: int = 0
    embedder_endpoint: Optional[str] = None
    embedder_model: Optional[str] = None

    def to_json(self) -> dict:
        return {
            "paths": {
                "project_root": self.project_root,
                "database": self.database,
                "tasks": self.tasks,
                "output_dir": self.output_dir,
            },
            "generation": self.generation.to_json(),
            "loop": self.loop.to_json(),
            "backend": {
                "kind": self.backend_kind,
                "endpoint": self.backend_endpoint,
                "model": self.backend_model,
            },
            "embedder": {
                "kind": self.embedder_kind,
                "dim": self.embedder_dim,
                "seed": self.embedder_seed,
                "endpoint": self.embedder_endpoint,
                "model": self.embedder_model,
            },
        }


def build_run_config(
    config_file: Optional[str] = None,
    flag_overrides: Optional[dict[str, dict[str, Any]]] = None,
) -> RunConfig:
    """Merge defaults, config file, and flag overrides (highest precedence last)."""
    merged: dict[str, dict[str, Any]] = {section: {} for section in _KNOWN_KEYS}
    if config_file:
        for section, values in load_config_file(config_file).items():
            merged[section].update(values)
    for section, values in (flag_overrides or {}).items():
        if section not in _KNOWN_KEYS:
            raise ConfigError(f"unknown override section {section!r}")
        merged[section].update({k: v for k, v in values.items() if v is not None})

    paths = merged["paths"]
    gen = merged["generation"]
    loop = merged["loop"]
    backend = merged["backend"]
    embedder = merged["embedder"]

    try:
        generation = GenerationConfig(
            temperature=gen.get("temperature", 0.7),
            top_k=gen.get("top_k"),
            n_samples=gen.get("n_samples", 1),
            max_new_tokens=gen.get("max_new_tokens", 1024),
            prompt_char_budget=gen.get("prompt_char_budget", 12_000),
        )
        loop_config = LoopConfig(
            max_iterations=loop.get("max_iterations", 3),
            n_candidates=loop.get("n_candidates", 20),
            retrieval_n=loop.get("retrieval_n", 5),
            checker=loop.get("checker", "builtin"),
            fallback_to_builtin=loop.get("fallback_to_builtin", True),
            test_timeout=loop.get("test_timeout", 30.0),
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc

    return RunConfig(
        project_root=paths.get("project_root"),
        database=paths.get("database"),
        tasks=paths.get("tasks"),
        output_dir=paths.get("output_dir", "out"),
        generation=generation,
        loop=loop_config,
        backend_kind=backend.get("kind", "remote"),
        backend_endpoint=backend.get("endpoint"),
        backend_model=backend.get("model"),
        embedder_kind=embedder.get("kind", "local"),
        embedder_dim=embedder.get("dim"),
        embedder_seed=embedder.get("seed", 0),
        embedder_endpoint=embedder.get("endpoint"),
        embedder_model=embedder.get("model"),
    )
