"""Deterministic rule-table planner backend.

Offline stand-in for an LLM planner: primary function from area, road
distance, the district prompt, a hash jitter, and neighbor clustering. The
jitter hashes the dossier's geometry so the same rules spread differently
across different layouts, while identical inputs always replan identically.
"""
from __future__ import annotations

import hashlib
import math
import struct
from typing import Mapping, Optional

from ..instances import InstanceDossier, InstanceId
from .backend import PlannerBackend
from .config import DEFAULT_RULES, SECONDARY_BY_FUNCTION, STYLES, RuleTable
from .plans import GlobalPrompt, InstancePlan


def _jitter(dossier: InstanceDossier, channel: str) -> float:
    """Deterministic uniform [0,1) drawn from the dossier's identity + geometry."""
    payload = struct.pack(
        "<iiiiiii",
        dossier.id.class_id,
        dossier.id.index,
        dossier.pixel_count,
        *dossier.bbox,
    )
    digest = hashlib.sha256(payload + channel.encode()).digest()
    return int.from_bytes(digest[:8], "little") / 2.0**64


def size_class_for_area(area_m2: float, rules: RuleTable = DEFAULT_RULES) -> str:
    if area_m2 <= rules.size_low_max_m2:
        return "low_rise"
    if area_m2 <= rules.size_mid_max_m2:
        return "mid_rise"
    return "high_rise"


class RuleBasedBackend(PlannerBackend):
    name = "rule"
    deterministic = True

    def __init__(self, rules: RuleTable = DEFAULT_RULES):
        self.rules = rules

    def _base_function(self, dossier: InstanceDossier, prompt: GlobalPrompt) -> str:
        rules = self.rules
        area = dossier.area_m2
        d_road = dossier.distance_to_road_m
        if prompt.wants_commercial:
            if d_road <= rules.commercial_max_road_dist_m and area >= rules.commercial_min_area_m2:
                return "commercial"
            if area >= rules.commercial_ps_min_area_m2:
                return "public_service"
            if _jitter(dossier, "jitter") < rules.commercial_jitter_healthcare:
                return "healthcare"
            return "residential"
        if area >= rules.residential_ps_min_area_m2 and d_road <= rules.residential_ps_max_road_dist_m:
            return "public_service"
        u = _jitter(dossier, "jitter")
        cum = 0.0
        for function, share in rules.residential_jitter:
            cum += share
            if u < cum:
                return function
        return "residential"

    def _neighbor_adoption(
        self,
        dossier: InstanceDossier,
        neighbor_plans: Mapping[InstanceId, InstancePlan],
        base: str,
    ) -> str:
        if base != "residential" or not neighbor_plans:
            return base
        tallies: dict[str, int] = {}
        for plan in neighbor_plans.values():
            if plan.primary_function != "residential":
                tallies[plan.primary_function] = tallies.get(plan.primary_function, 0) + 1
        if not tallies:
            return base
        top = max(sorted(tallies), key=lambda fn: tallies[fn])
        if tallies[top] < self.rules.neighbor_adopt_min_count:
            return base
        if _jitter(dossier, "conformity") < self.rules.neighbor_adopt_conformity:
            return top
        return base

    def plan_instance(
        self,
        dossier: InstanceDossier,
        neighbor_plans: Mapping[InstanceId, InstancePlan],
        prompt: GlobalPrompt,
        prior: Optional[InstancePlan],
    ) -> InstancePlan:
        # Non-residential assignments are sticky: once an instance has a
        # specialized function the rules never downgrade it, which keeps the
        # refinement loop free of oscillation.
        if prior is not None and prior.primary_function != "residential":
            return prior
        function = self._base_function(dossier, prompt)
        function = self._neighbor_adoption(dossier, neighbor_plans, function)
        if prior is not None and prior.primary_function == function:
            return prior

        secondary_options = SECONDARY_BY_FUNCTION[function]
        secondary = secondary_options[int(_jitter(dossier, "secondary") * len(secondary_options))]
        style = STYLES[int(_jitter(dossier, "style") * len(STYLES))]
        d_road = dossier.distance_to_road_m
        road_note = "far from roads" if not math.isfinite(d_road) or d_road > 10 else "with road access"
        reasoning = (
            f"{dossier.area_m2:.0f} m2 footprint {road_note} in a "
            f"{'commercial' if prompt.wants_commercial else 'residential'} district; "
            f"assigned {function}"
        )
        return InstancePlan(
            id=dossier.id,
            primary_function=function,
            secondary_function=secondary,
            size_class=size_class_for_area(dossier.area_m2, self.rules),
            style=style,
            reasoning=reasoning,
            revision=1 if prior is None else prior.revision,
        )
