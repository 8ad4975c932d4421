"""Plan records, planning state, and the function-distribution summary."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Dict, List, Tuple

from ..instances import InstanceId

PRIMARY_FUNCTIONS = (
    "residential",
    "commercial",
    "public_service",
    "healthcare",
    "education",
    "industrial",
    "other",
)
SIZE_CLASSES = ("low_rise", "mid_rise", "high_rise")


class NoBuildingsError(ValueError):
    pass


@dataclass(frozen=True)
class InstancePlan:
    id: InstanceId
    primary_function: str
    secondary_function: str
    size_class: str
    style: str
    reasoning: str
    revision: int = 1

    def __post_init__(self) -> None:
        if self.primary_function not in PRIMARY_FUNCTIONS:
            raise ValueError(f"unknown primary_function {self.primary_function!r}")
        if self.size_class not in SIZE_CLASSES:
            raise ValueError(f"unknown size_class {self.size_class!r}")
        if self.revision < 1:
            raise ValueError("revision must be >= 1")

    def content_equals(self, other: "InstancePlan") -> bool:
        """Equality on the four content fields; reasoning-only edits don't count."""
        return (
            self.primary_function == other.primary_function
            and self.secondary_function == other.secondary_function
            and self.size_class == other.size_class
            and self.style == other.style
        )


@dataclass(frozen=True)
class GlobalPrompt:
    text: str

    def __post_init__(self) -> None:
        if not self.text.strip():
            raise ValueError("global prompt must be non-empty")

    @property
    def wants_commercial(self) -> bool:
        return "commercial" in self.text.lower()


@dataclass
class PlanningState:
    plans: Dict[InstanceId, InstancePlan] = field(default_factory=dict)
    round: int = 0
    change_history: List[Tuple[int, int, int]] = field(default_factory=list)  # (round, changes, total)


def function_distribution(state: PlanningState) -> Dict[str, float]:
    """Fractions of building plans per primary function (sums to 1)."""
    if not state.plans:
        raise NoBuildingsError("no building plans in state")
    counts: Dict[str, int] = {}
    for plan in state.plans.values():
        counts[plan.primary_function] = counts.get(plan.primary_function, 0) + 1
    total = sum(counts.values())
    return {fn: counts[fn] / total for fn in sorted(counts)}


# -- JSONL plan records -------------------------------------------------------

def plan_to_record(plan: InstancePlan) -> dict:
    return {
        "class_id": plan.id.class_id,
        "index": plan.id.index,
        "primary_function": plan.primary_function,
        "secondary_function": plan.secondary_function,
        "size_class": plan.size_class,
        "style": plan.style,
        "reasoning": plan.reasoning,
        "revision": plan.revision,
    }


def plan_from_record(record: dict) -> InstancePlan:
    return InstancePlan(
        id=InstanceId(record["class_id"], record["index"]),
        primary_function=record["primary_function"],
        secondary_function=record["secondary_function"],
        size_class=record["size_class"],
        style=record["style"],
        reasoning=record["reasoning"],
        revision=record["revision"],
    )


def write_plans(state: PlanningState) -> str:
    lines = [json.dumps(plan_to_record(state.plans[k]), separators=(",", ":")) for k in sorted(state.plans)]
    return "\n".join(lines) + ("\n" if lines else "")


def read_plans(text: str) -> PlanningState:
    state = PlanningState()
    for line in text.splitlines():
        if not line.strip():
            continue
        plan = plan_from_record(json.loads(line))
        state.plans[plan.id] = plan
    state.round = 1 if state.plans else 0
    return state
