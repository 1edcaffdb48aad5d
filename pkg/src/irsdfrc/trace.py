"""Per-iteration solver records."""

from __future__ import annotations

import math
from dataclasses import dataclass, field


@dataclass
class SolverTrace:
    """Iteration history of a phase-design engine.

    wall_ns holds cumulative elapsed time since the solver started;
    surrogate and step_size are NaN where an engine has no such quantity.
    """

    objective: list = field(default_factory=list)
    surrogate: list = field(default_factory=list)
    gamma_r: list = field(default_factory=list)
    gamma_u: list = field(default_factory=list)
    step_size: list = field(default_factory=list)
    wall_ns: list = field(default_factory=list)
    iterate_change: list = field(default_factory=list)
    unit_dev: list = field(default_factory=list)
    converged: bool = False
    stop_reason: str = ""
    notes: list = field(default_factory=list)

    def record(
        self,
        *,
        objective: float,
        gamma_r: float,
        gamma_u: float,
        surrogate: float = math.nan,
        step_size: float = math.nan,
        wall_ns: int = 0,
        iterate_change: float = math.nan,
        unit_dev: float = 0.0,
    ) -> None:
        self.objective.append(float(objective))
        self.surrogate.append(float(surrogate))
        self.gamma_r.append(float(gamma_r))
        self.gamma_u.append(float(gamma_u))
        self.step_size.append(float(step_size))
        self.wall_ns.append(int(wall_ns))
        self.iterate_change.append(float(iterate_change))
        self.unit_dev.append(float(unit_dev))

    def __len__(self) -> int:
        return len(self.objective)

    @property
    def iterations(self) -> int:
        return len(self.objective)

    def max_unit_dev(self) -> float:
        return max(self.unit_dev) if self.unit_dev else 0.0
