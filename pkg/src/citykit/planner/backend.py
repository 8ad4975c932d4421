"""Planner backend interface and failure type."""
from __future__ import annotations

from abc import ABC, abstractmethod
from typing import Mapping, Optional

from ..instances import InstanceDossier, InstanceId
from .plans import GlobalPrompt, InstancePlan


class BackendFailureError(RuntimeError):
    def __init__(self, instance: Optional[InstanceId], detail: str):
        self.instance = instance
        self.detail = detail
        name = f"{instance.class_id}/{instance.index}" if instance else "?"
        super().__init__(f"planner backend failed on instance {name}: {detail}")


class PlannerBackend(ABC):
    """Produces one plan per query; deterministic backends must return
    identical plans for identical (dossier, neighbor plans, prompt, prior)."""

    name: str = "backend"
    deterministic: bool = False

    @abstractmethod
    def plan_instance(
        self,
        dossier: InstanceDossier,
        neighbor_plans: Mapping[InstanceId, InstancePlan],
        prompt: GlobalPrompt,
        prior: Optional[InstancePlan],
    ) -> InstancePlan:
        raise NotImplementedError
