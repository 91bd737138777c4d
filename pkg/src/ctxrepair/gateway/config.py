"""Sampling configuration passed to completion backends."""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Optional

DEFAULT_TEMPERATURE = 0.7
DEFAULT_PROMPT_CHAR_BUDGET = 12_000


@dataclass(frozen=True)
class GenerationConfig:
    """Decoding parameters: temperature 0.7 with top-k sampling by default.

    ``prompt_char_budget`` caps how many characters of context get inlined
    into a prompt; ``top_k`` is forwarded verbatim when the backend supports
    it (no default value is claimed).
    """

    temperature: float = DEFAULT_TEMPERATURE
    top_k: Optional[int] = None
    n_samples: int = 1
    max_new_tokens: int = 1024
    prompt_char_budget: int = DEFAULT_PROMPT_CHAR_BUDGET

    def __post_init__(self) -> None:
        if self.temperature < 0:
            raise ValueError("temperature must be >= 0")
        if self.n_samples < 1:
            raise ValueError("n_samples must be >= 1")

    def with_samples(self, n: int) -> "GenerationConfig":
        return replace(self, n_samples=n)

    def to_json(self) -> dict:
        return {
            "temperature": self.temperature,
            "top_k": self.top_k,
            "n_samples": self.n_samples,
            "max_new_tokens": self.max_new_tokens,
            "prompt_char_budget": self.prompt_char_budget,
        }
