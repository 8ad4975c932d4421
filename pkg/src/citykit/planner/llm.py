"""LLM planner backend over an OpenAI-compatible chat-completions endpoint.

The user message serializes the dossier, current neighbor plans, the global
prompt, and (from round 2) the prior plan and its reasoning, asking keep or
replace. The reply must be a single JSON object with the plan's key set; a
{"keep": true} reply re-confirms the prior plan. Replies with an invalid
primary function are re-requested up to 2 times, then mapped to "other";
replies that never parse raise MalformedReplyError.
"""
from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass
from typing import Mapping, Optional

from ..instances import InstanceDossier, InstanceId
from .backend import PlannerBackend
from .plans import PRIMARY_FUNCTIONS, SIZE_CLASSES, GlobalPrompt, InstancePlan
from .rules import size_class_for_area
from .transport import Transport

SYSTEM_PROMPT = (
    "You are an urban land-use planner. For each building instance you receive "
    "its geometry facts, its neighbors' current plans, and a district directive. "
    "Reply with a single JSON object and nothing else, using exactly the keys "
    '{"primary_function", "secondary_function", "size_class", "style", "reasoning"}. '
    f"primary_function must be one of {list(PRIMARY_FUNCTIONS)}; "
    f"size_class one of {list(SIZE_CLASSES)}. "
    'If you are shown a previous plan and want to keep it, reply {"keep": true}.'
)

REQUIRED_KEYS = {"primary_function", "secondary_function", "size_class", "style", "reasoning"}

_JSON_RE = re.compile(r"\{.*\}", re.DOTALL)


class MalformedReplyError(RuntimeError):
    def __init__(self, raw: str):
        self.raw = raw
        super().__init__(f"planner reply is not a valid plan object: {raw[:200]!r}")


@dataclass(frozen=True)
class LlmConfig:
    model: str = "gpt-4o"
    temperature: float = 0.2
    invalid_reply_retries: int = 2


def _dossier_payload(dossier: InstanceDossier) -> dict:
    d = dossier.distance_to_road_m
    return {
        "instance": {"class_id": dossier.id.class_id, "index": dossier.id.index},
        "area_m2": round(dossier.area_m2, 2),
        "size_px": list(dossier.size_px),
        "centroid_px": [round(v, 1) for v in dossier.centroid],
        "distance_to_road_m": None if math.isinf(d) else round(d, 2),
        "neighbor_count": len(dossier.neighbors),
        "compactness": round(dossier.compactness, 3),
    }


def build_user_message(
    dossier: InstanceDossier,
    neighbor_plans: Mapping[InstanceId, InstancePlan],
    prompt: GlobalPrompt,
    prior: Optional[InstancePlan],
) -> str:
    payload = {
        "district_directive": prompt.text,
        "dossier": _dossier_payload(dossier),
        "neighbor_plans": [
            {
                "instance": {"class_id": n.class_id, "index": n.index},
                "primary_function": plan.primary_function,
                "secondary_function": plan.secondary_function,
                "size_class": plan.size_class,
            }
            for n, plan in sorted(neighbor_plans.items())
        ],
    }
    if prior is not None:
        payload["previous_plan"] = {
            "primary_function": prior.primary_function,
            "secondary_function": prior.secondary_function,
            "size_class": prior.size_class,
            "style": prior.style,
            "reasoning": prior.reasoning,
        }
        payload["question"] = "Keep the previous plan or make a new one?"
    return json.dumps(payload, separators=(",", ":"))


def _extract_object(text: str) -> Optional[dict]:
    match = _JSON_RE.search(text)
    if not match:
        return None
    try:
        obj = json.loads(match.group(0))
    except json.JSONDecodeError:
        return None
    return obj if isinstance(obj, dict) else None


class LlmPlannerBackend(PlannerBackend):
    name = "llm"
    deterministic = False

    def __init__(self, transport: Transport, config: LlmConfig = LlmConfig()):
        self.transport = transport
        self.config = config
        self.requests_made = 0

    def _request(self, user_message: str) -> str:
        self.requests_made += 1
        response = self.transport(
            {
                "model": self.config.model,
                "temperature": self.config.temperature,
                "messages": [
                    {"role": "system", "content": SYSTEM_PROMPT},
                    {"role": "user", "content": user_message},
                ],
            }
        )
        try:
            return response["choices"][0]["message"]["content"]
        except (KeyError, IndexError, TypeError) as exc:
            raise MalformedReplyError(json.dumps(response)[:500]) from exc

    def plan_instance(
        self,
        dossier: InstanceDossier,
        neighbor_plans: Mapping[InstanceId, InstancePlan],
        prompt: GlobalPrompt,
        prior: Optional[InstancePlan],
    ) -> InstancePlan:
        user_message = build_user_message(dossier, neighbor_plans, prompt, prior)
        raw = ""
        parsed: Optional[dict] = None
        for attempt in range(self.config.invalid_reply_retries + 1):
            raw = self._request(user_message)
            obj = _extract_object(raw)
            if obj is None:
                continue
            if obj.get("keep") is True and prior is not None:
                return prior
            if REQUIRED_KEYS.issubset(obj.keys()):
                parsed = obj
                if obj["primary_function"] in PRIMARY_FUNCTIONS:
                    break
                # invalid enum: retry, keeping the last parsed reply as fallback
        if parsed is None:
            raise MalformedReplyError(raw)
        primary = parsed["primary_function"]
        if primary not in PRIMARY_FUNCTIONS:
            primary = "other"
        size_class = parsed["size_class"]
        if size_class not in SIZE_CLASSES:
            size_class = size_class_for_area(dossier.area_m2)
        return InstancePlan(
            id=dossier.id,
            primary_function=primary,
            secondary_function=str(parsed["secondary_function"]),
            size_class=size_class,
            style=str(parsed["style"]),
            reasoning=str(parsed["reasoning"]),
            revision=1 if prior is None else prior.revision,
        )
