"""Multi-round planning loop with change-ratio convergence.

Each round visits every building instance in ascending id order, shows the
backend the previous round's neighbor plans (synchronous-update snapshot),
and counts how many plans changed content. The loop converges when
changes/total drops below the threshold; round 1 always counts every new
plan as a change.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Dict, Mapping

from ..instances import InstanceDossier, InstanceId, building_ids
from .backend import BackendFailureError, PlannerBackend
from .plans import GlobalPrompt, InstancePlan, PlanningState

DEFAULT_THRESHOLD = 0.05
DEFAULT_MAX_ROUNDS = 10


def plan_round(
    state: PlanningState,
    dossiers: Mapping[InstanceId, InstanceDossier],
    prompt: GlobalPrompt,
    backend: PlannerBackend,
) -> PlanningState:
    """Run one full planning round; transactional (failure leaves state untouched)."""
    plannable = building_ids(dict(dossiers))
    results: Dict[InstanceId, InstancePlan] = {}
    for instance_id in plannable:
        dossier = dossiers[instance_id]
        neighbor_plans = {
            n: state.plans[n]
            for n, _ in dossier.neighbors
            if n in state.plans
        }
        prior = state.plans.get(instance_id)
        try:
            plan = backend.plan_instance(dossier, neighbor_plans, prompt, prior)
        except BackendFailureError:
            raise
        except Exception as exc:
            raise BackendFailureError(instance_id, f"{type(exc).__name__}: {exc}") from exc
        if plan.id != instance_id:
            raise BackendFailureError(instance_id, f"backend returned plan for {plan.id}")
        results[instance_id] = plan

    changes = 0
    committed: Dict[InstanceId, InstancePlan] = {}
    for instance_id, plan in results.items():
        prior = state.plans.get(instance_id)
        if prior is None:
            committed[instance_id] = replace(plan, revision=1)
            changes += 1
        elif plan.content_equals(prior):
            committed[instance_id] = prior  # revision only moves on content change
        else:
            committed[instance_id] = replace(plan, revision=prior.revision + 1)
            changes += 1

    executed_round = state.round + 1
    return PlanningState(
        plans=committed,
        round=executed_round,
        change_history=state.change_history + [(executed_round, changes, len(plannable))],
    )


@dataclass(frozen=True)
class PlanningResult:
    state: PlanningState
    converged: bool
    rounds_run: int
    final_change_ratio: float


def run_until_converged(
    dossiers: Mapping[InstanceId, InstanceDossier],
    prompt: GlobalPrompt,
    backend: PlannerBackend,
    threshold: float = DEFAULT_THRESHOLD,
    max_rounds: int = DEFAULT_MAX_ROUNDS,
) -> PlanningResult:
    if not 0 < threshold < 1:
        raise ValueError("threshold must lie in (0, 1)")
    if max_rounds < 1:
        raise ValueError("max_rounds must be >= 1")
    state = PlanningState()
    ratio = 1.0
    for _ in range(max_rounds):
        state = plan_round(state, dossiers, prompt, backend)
        rnd, changes, total = state.change_history[-1]
        if total == 0:
            return PlanningResult(state, True, rnd, 0.0)
        ratio = changes / total
        if rnd >= 2 and ratio < threshold:
            return PlanningResult(state, True, rnd, ratio)
    return PlanningResult(state, False, state.round, ratio)
