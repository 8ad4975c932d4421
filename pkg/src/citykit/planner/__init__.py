"""Iterative city planning: plan types, round loop, rule and LLM backends."""
from __future__ import annotations

from .backend import BackendFailureError, PlannerBackend
from .config import DEFAULT_RULES, RuleTable
from .llm import LlmConfig, LlmPlannerBackend, MalformedReplyError
from .loop import (
    DEFAULT_MAX_ROUNDS,
    DEFAULT_THRESHOLD,
    PlanningResult,
    plan_round,
    run_until_converged,
)
from .plans import (
    PRIMARY_FUNCTIONS,
    SIZE_CLASSES,
    GlobalPrompt,
    InstancePlan,
    NoBuildingsError,
    PlanningState,
    function_distribution,
    plan_from_record,
    plan_to_record,
    read_plans,
    write_plans,
)
from .rules import RuleBasedBackend, size_class_for_area
from .transport import (
    AuthFailureError,
    HttpChatTransport,
    PlannerTimeoutError,
    RecordingTransport,
    ReplayTransport,
)

__all__ = [
    "AuthFailureError",
    "BackendFailureError",
    "DEFAULT_MAX_ROUNDS",
    "DEFAULT_RULES",
    "DEFAULT_THRESHOLD",
    "GlobalPrompt",
    "HttpChatTransport",
    "InstancePlan",
    "LlmConfig",
    "LlmPlannerBackend",
    "MalformedReplyError",
    "NoBuildingsError",
    "PRIMARY_FUNCTIONS",
    "PlannerBackend",
    "PlannerTimeoutError",
    "PlanningResult",
    "PlanningState",
    "RecordingTransport",
    "ReplayTransport",
    "RuleBasedBackend",
    "RuleTable",
    "SIZE_CLASSES",
    "function_distribution",
    "plan_from_record",
    "plan_round",
    "plan_to_record",
    "read_plans",
    "run_until_converged",
    "size_class_for_area",
    "write_plans",
]
