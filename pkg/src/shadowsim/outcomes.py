"""Outcome distributions shared by every engine and experiment runner."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

Outcome = Union[str, tuple[str, str]]

ENGINE_STREAMS = "streams"
ENGINE_HILBERT = "hilbert"
ENGINE_CLOSED_FORM = "closed-form"

_SUM_TOL = 1e-12


@dataclass(frozen=True)
class OutcomeDistribution:
    """Normalized probabilities over detector (or joint detector) outcomes.

    ``engine`` records which backend produced the numbers: streams,
    hilbert, or closed-form.
    ``parameters`` carries everything needed to reproduce the run, seed
    included when one was used.  ``path_weights`` optionally stores, per
    outcome, the conditional weights of the paths feeding it; samplers use
    it to narrate a hidden tangible path per shot.
    """

    outcomes: dict[Outcome, float]
    engine: str
    parameters: dict = field(default_factory=dict)
    path_weights: dict[Outcome, dict[str, float]] | None = None

    def __post_init__(self) -> None:
        cleaned: dict[Outcome, float] = {}
        for key, p in self.outcomes.items():
            if p < 0.0:
                if p < -_SUM_TOL:
                    raise ValueError(f"negative probability {p!r} for {key!r}")
                p = 0.0
            if p > 1.0 + _SUM_TOL:
                raise ValueError(f"probability {p!r} for {key!r} exceeds 1")
            cleaned[key] = min(p, 1.0)
        total = sum(cleaned.values())
        if abs(total - 1.0) > _SUM_TOL:
            raise ValueError(f"probabilities sum to {total!r}, not 1")
        object.__setattr__(self, "outcomes", cleaned)

    def probability(self, outcome: Outcome) -> float:
        return self.outcomes.get(outcome, 0.0)

    def labels(self) -> list[Outcome]:
        return list(self.outcomes)

    def to_jsonable(self) -> dict:
        """JSON-friendly form; joint outcomes become two-element lists."""
        rows = []
        for key, p in self.outcomes.items():
            out = list(key) if isinstance(key, tuple) else key
            rows.append({"outcome": out, "probability": p})
        return {
            "engine": self.engine,
            "parameters": dict(self.parameters),
            "outcomes": rows,
        }
