"""Three-valued answers for checks that only explore a bounded state space."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Any


class Status(enum.Enum):
    HOLDS = "holds-within-bound"
    VIOLATED = "violated"
    UNKNOWN = "unknown"

    def __str__(self) -> str:
        return self.value

    @property
    def exit_code(self) -> int:
        return {Status.HOLDS: 0, Status.VIOLATED: 1, Status.UNKNOWN: 2}[self]


@dataclass(frozen=True)
class Verdict:
    status: Status
    witness: Any = None
    bounds: dict[str, int] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.status is Status.VIOLATED and self.witness is None:
            raise ValueError("a violated verdict needs a witness")

    @property
    def holds(self) -> bool:
        return self.status is Status.HOLDS

    @property
    def violated(self) -> bool:
        return self.status is Status.VIOLATED
