"""FSM execution: stepping, simulation, search, traces and their summaries.

Execution is deterministic: among enabled transitions the first in
declaration order fires.  Simulation emits a derivational trace — the ordered
log of states visited, transitions taken and world snapshots — which later
powers episodic answers.  ``explore`` is the breadth-first counterpart that
expands every enabled transition and is used as the search harness and test
oracle for simulation fixtures.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from collections import deque
from typing import Callable, Mapping, Optional

from .errors import IvyError, MissingSlot, NoMethodForTask
from .expressions import Expression, SlotValue, eval_expression, render_expression
from .model import DEFAULT_SUBTASK_DEPTH, Action, Method, TmkModel, Transition

WorldState = Mapping[str, SlotValue]

DEFAULT_STEP_LIMIT = 10_000
DEFAULT_NODE_BUDGET = 1_000_000

OUTCOMES = ("reached_end", "step_limit", "stuck", "constraint_violation")


class SubtaskDepthExceeded(IvyError):
    """Hierarchical simulation recursed past the configured depth limit."""


@dataclass(frozen=True)
class TraceEvent:
    step_index: int
    state_id: str
    transition_id: str | None
    world_state: dict[str, SlotValue]
    note: str
    depth: int = 0


@dataclass(frozen=True)
class DerivationalTrace:
    trace_id: str
    model_id: str
    task_id: str
    events: tuple[TraceEvent, ...]
    outcome: str


@dataclass
class TraceSummary:
    trace_id: str
    model_id: str
    task_id: str
    outcome: str
    states_visited: list[str]
    transitions: list[dict]
    final_world_state: dict[str, SlotValue]
    violated_constraint: str | None = None
    violation_step: int | None = None


def apply_actions(actions: tuple[Action, ...], world: WorldState) -> dict[str, SlotValue]:
    """New snapshot with all action expressions evaluated against the ORIGINAL
    world, then assigned (simultaneous-assignment semantics)."""
    values = [(a.slot, eval_expression(a.expression, world)) for a in actions]
    updated = dict(world)
    updated.update(values)
    return updated


def enabled_transitions(method: Method, state_id: str, world: WorldState) -> list[Transition]:
    return [
        t
        for t in method.outgoing(state_id)
        if eval_expression(t.condition, world) is True
    ]


def step(
    method: Method, current: str, world: WorldState
) -> Optional[tuple[str, dict[str, SlotValue], Transition]]:
    """Fire the first enabled transition out of ``current``; None when stuck."""
    for transition in method.outgoing(current):
        if eval_expression(transition.condition, world) is True:
            return transition.to_state, apply_actions(transition.actions, world), transition
    return None


def _trace_id_for(model_id: str, task_id: str, events, outcome: str) -> str:
    # Content-addressed: identical simulations yield identical ids, which
    # keeps persistence idempotent and CLI/HTTP outputs byte-comparable.
    payload = json.dumps(
        {
            "model_id": model_id,
            "task_id": task_id,
            "outcome": outcome,
            "events": [
                [e.step_index, e.state_id, e.transition_id, sorted(e.world_state.items()), e.note, e.depth]
                for e in events
            ],
        },
        sort_keys=True,
        default=str,
    )
    return "tr-" + hashlib.sha256(payload.encode()).hexdigest()[:16]


class _Recorder:
    """Accumulates trace events with a shared step budget."""

    def __init__(self, step_limit: int):
        self.events: list[TraceEvent] = []
        self.remaining = step_limit

    def record(self, state_id: str, transition_id: str | None, world: WorldState,
               note: str, depth: int) -> TraceEvent:
        event = TraceEvent(
            step_index=len(self.events),
            state_id=state_id,
            transition_id=transition_id,
            world_state=dict(world),
            note=note,
            depth=depth,
        )
        self.events.append(event)
        return event


def simulate(
    model: TmkModel,
    task_id: str,
    initial: WorldState,
    step_limit: int = DEFAULT_STEP_LIMIT,
    store: Optional["TraceStore"] = None,
    max_subtask_depth: int = DEFAULT_SUBTASK_DEPTH,
) -> DerivationalTrace:
    """Run the task's first method from ``initial`` until an end state, a dead
    end, a violated invariant, or the step limit.  Persists the trace when a
    store is given."""
    method = model.primary_method(task_id)
    if method is None:
        raise NoMethodForTask(task_id)
    recorder = _Recorder(step_limit)
    outcome = _run_method(model, method, initial, recorder, depth=0,
                          max_depth=max_subtask_depth, final=True)
    events = tuple(recorder.events)
    trace = DerivationalTrace(
        trace_id=_trace_id_for(model.id, task_id, events, outcome),
        model_id=model.id,
        task_id=task_id,
        events=events,
        outcome=outcome,
    )
    if store is not None:
        store.save_trace(trace)
    return trace


def _run_method(
    model: TmkModel,
    method: Method,
    initial: WorldState,
    recorder: _Recorder,
    depth: int,
    max_depth: int,
    final: bool,
) -> str:
    """Execute one method, recording events at ``depth``; returns the outcome.

    ``final`` marks the outermost call, whose reached_end event gets the
    makes post-condition annotation.
    """
    if depth == 0:
        note = "initial state"
    else:
        note = f"enter sub-task {method.task_ref!r}"
    recorder.record(method.start_state, None, initial, note, depth)

    current = method.start_state
    world = dict(initial)

    sub_outcome = _maybe_run_subtask(model, method, current, world, recorder, depth, max_depth)
    if sub_outcome is not None:
        outcome, world = sub_outcome
        if outcome != "reached_end":
            return outcome

    while True:
        if current in method.end_states:
            if final and recorder.events:
                _annotate_makes(model, method, world, recorder)
            return "reached_end"
        if recorder.remaining <= 0:
            return "step_limit"
        result = step(method, current, world)
        if result is None:
            return "stuck"
        next_state, next_world, transition = result
        recorder.remaining -= 1
        note = transition.description
        violated = (
            method.invariant is not None
            and eval_expression(method.invariant, next_world) is not True
        )
        if violated:
            note += f" [invariant violated: {render_expression(method.invariant)}]"
        recorder.record(next_state, transition.id, next_world, note, depth)
        if violated:
            return "constraint_violation"
        current, world = next_state, next_world

        sub_outcome = _maybe_run_subtask(model, method, current, world, recorder, depth, max_depth)
        if sub_outcome is not None:
            outcome, world = sub_outcome
            if outcome != "reached_end":
                return outcome


def _maybe_run_subtask(model, method, state_id, world, recorder, depth, max_depth):
    """Entering a state with a sub-task runs that task's first method inline,
    splicing its events one depth level down."""
    state = method.state(state_id)
    if state.sub_task_ref is None:
        return None
    if depth + 1 > max_depth:
        raise SubtaskDepthExceeded(
            f"sub-task nesting exceeded depth limit {max_depth} at state {state_id!r}"
        )
    child = model.primary_method(state.sub_task_ref)
    if child is None:
        raise NoMethodForTask(state.sub_task_ref)
    outcome = _run_method(model, child, world, recorder, depth + 1, max_depth, final=False)
    return outcome, dict(recorder.events[-1].world_state)


def _annotate_makes(model: TmkModel, method: Method, world: WorldState, recorder: _Recorder) -> None:
    # Optional post-condition: makes constraints are documentation, checked
    # and noted on the final event but never failing the run.
    task = model.task(method.task_ref)
    unmet = []
    for param in task.makes:
        if param.constraint is None:
            continue
        try:
            if eval_expression(param.constraint, world) is not True:
                unmet.append(param.name)
        except MissingSlot:
            unmet.append(param.name)
    if unmet:
        last = recorder.events[-1]
        recorder.events[-1] = TraceEvent(
            step_index=last.step_index,
            state_id=last.state_id,
            transition_id=last.transition_id,
            world_state=last.world_state,
            note=last.note + f" [makes unsatisfied: {', '.join(sorted(unmet))}]",
            depth=last.depth,
        )


def explore(
    model: TmkModel,
    task_id: str,
    initial: WorldState,
    goal: Expression,
    node_budget: int = DEFAULT_NODE_BUDGET,
) -> Optional[DerivationalTrace]:
    """Breadth-first search expanding ALL enabled transitions, deduplicating
    visited (state, world) pairs.  Returns a shortest trace that reaches an
    end state with ``goal`` true, or None.  Sub-task states are treated as
    plain states here."""
    method = model.primary_method(task_id)
    if method is None:
        raise NoMethodForTask(task_id)

    def frozen(world: WorldState) -> tuple:
        return tuple(sorted(world.items()))

    def satisfied(state_id: str, world: WorldState) -> bool:
        return state_id in method.end_states and eval_expression(goal, world) is True

    start = (method.start_state, dict(initial))
    if satisfied(*start):
        events = (
            TraceEvent(0, method.start_state, None, dict(initial), "initial state"),
        )
        return DerivationalTrace(
            trace_id=_trace_id_for(model.id, task_id, events, "reached_end"),
            model_id=model.id,
            task_id=task_id,
            events=events,
            outcome="reached_end",
        )

    seen = {(start[0], frozen(start[1]))}
    # parent chain: node -> (parent_key, transition, world after firing)
    parents: dict[tuple, tuple] = {}
    frontier = deque([(start[0], start[1])])
    expanded = 0
    goal_key = None

    while frontier and goal_key is None:
        state_id, world = frontier.popleft()
        expanded += 1
        if expanded > node_budget:
            return None
        for transition in method.outgoing(state_id):
            if eval_expression(transition.condition, world) is not True:
                continue
            next_world = apply_actions(transition.actions, world)
            key = (transition.to_state, frozen(next_world))
            if key in seen:
                continue
            seen.add(key)
            parents[key] = ((state_id, frozen(world)), transition, next_world)
            if satisfied(transition.to_state, next_world):
                goal_key = key
                break
            frontier.append((transition.to_state, next_world))

    if goal_key is None:
        return None

    chain = []
    key = goal_key
    start_key = (start[0], frozen(start[1]))
    while key != start_key:
        parent_key, transition, world_after = parents[key]
        chain.append((transition, world_after))
        key = parent_key
    chain.reverse()

    events = [TraceEvent(0, method.start_state, None, dict(initial), "initial state")]
    for i, (transition, world_after) in enumerate(chain, start=1):
        events.append(
            TraceEvent(i, transition.to_state, transition.id, dict(world_after),
                       transition.description)
        )
    events = tuple(events)
    return DerivationalTrace(
        trace_id=_trace_id_for(model.id, task_id, events, "reached_end"),
        model_id=model.id,
        task_id=task_id,
        events=events,
        outcome="reached_end",
    )


_VIOLATION_MARKER = "[invariant violated: "


def summarize_trace(trace: DerivationalTrace) -> TraceSummary:
    """Lossless digest: every event exactly once, in order."""
    transitions = [
        {"step_index": e.step_index, "transition_id": e.transition_id, "description": e.note}
        for e in trace.events
        if e.transition_id is not None
    ]
    violated = None
    violation_step = None
    if trace.outcome == "constraint_violation":
        last = trace.events[-1]
        violation_step = last.step_index
        marker = last.note.rfind(_VIOLATION_MARKER)
        if marker >= 0:
            violated = last.note[marker + len(_VIOLATION_MARKER):].rstrip("]")
    return TraceSummary(
        trace_id=trace.trace_id,
        model_id=trace.model_id,
        task_id=trace.task_id,
        outcome=trace.outcome,
        states_visited=[e.state_id for e in trace.events],
        transitions=transitions,
        final_world_state=dict(trace.events[-1].world_state),
        violated_constraint=violated,
        violation_step=violation_step,
    )


def render_trace_summary(summary: TraceSummary) -> str:
    """Plain-text narration of a trace, used by the CLI and episodic answers.
    The last line states the outcome."""
    lines = [f"Simulation of task {summary.task_id!r} on model {summary.model_id!r}."]
    lines.append(f"States visited: {' -> '.join(summary.states_visited)}")
    if summary.transitions:
        lines.append("Steps taken:")
        for t in summary.transitions:
            lines.append(f"  {t['step_index']}. {t['description']}")
    if summary.violated_constraint is not None:
        lines.append(
            f"Constraint violated at step {summary.violation_step}: {summary.violated_constraint}"
        )
    world = ", ".join(f"{k}={v}" for k, v in sorted(summary.final_world_state.items()))
    lines.append(f"Final world state: {world}")
    lines.append(f"Outcome: {summary.outcome}")
    return "\n".join(lines)


def validate_trace(model: TmkModel, trace: DerivationalTrace) -> list[str]:
    """Replay check: every fired transition's condition held on the prior
    snapshot and its actions reproduce the next snapshot exactly.  Returns a
    list of discrepancies (empty = trace replays cleanly)."""
    problems: list[str] = []
    if not trace.events:
        return ["trace has no events"]

    method = model.primary_method(trace.task_id)
    if method is None:
        return [f"no method for task {trace.task_id!r}"]

    first = trace.events[0]
    if first.state_id != method.start_state:
        problems.append(
            f"event 0 starts at {first.state_id!r}, expected {method.start_state!r}"
        )
    if first.transition_id is not None:
        problems.append("event 0 must not carry a transition")

    # Frame stack for hierarchical traces: (method, current_state, depth).
    stack = [[method, first.state_id, 0]]

    for i, event in enumerate(trace.events):
        if event.step_index != i:
            problems.append(f"event {i} has step_index {event.step_index}")
        if i == 0:
            continue
        prev = trace.events[i - 1]
        if event.transition_id is None:
            # sub-task entry: one level deeper, world unchanged
            parent_state_id = stack[-1][1]
            parent_method = stack[-1][0]
            try:
                parent_state = parent_method.state(parent_state_id)
            except KeyError:
                problems.append(f"event {i}: unknown parent state {parent_state_id!r}")
                continue
            if parent_state.sub_task_ref is None:
                problems.append(f"event {i}: entry event but state {parent_state_id!r} has no sub-task")
                continue
            child = model.primary_method(parent_state.sub_task_ref)
            if child is None:
                problems.append(f"event {i}: sub-task {parent_state.sub_task_ref!r} has no method")
                continue
            if event.depth != stack[-1][2] + 1:
                problems.append(f"event {i}: depth {event.depth}, expected {stack[-1][2] + 1}")
            if event.state_id != child.start_state:
                problems.append(f"event {i}: entry state {event.state_id!r} is not the sub-method start")
            if dict(event.world_state) != dict(prev.world_state):
                problems.append(f"event {i}: sub-task entry must not change the world state")
            stack.append([child, child.start_state, event.depth])
            continue

        while stack and stack[-1][2] > event.depth:
            frame_method, frame_state, _ = stack.pop()
            if frame_state not in frame_method.end_states:
                problems.append(
                    f"event {event.step_index}: left sub-method {frame_method.id!r} "
                    f"in non-end state {frame_state!r}"
                )
        if not stack or stack[-1][2] != event.depth:
            problems.append(f"event {i}: no frame at depth {event.depth}")
            break

        frame = stack[-1]
        try:
            transition = model.transition(event.transition_id)
        except KeyError:
            problems.append(f"event {i}: unknown transition {event.transition_id!r}")
            continue
        if transition.from_state != frame[1]:
            problems.append(
                f"event {i}: transition {transition.id!r} leaves {transition.from_state!r} "
                f"but the machine was in {frame[1]!r}"
            )
        if transition.to_state != event.state_id:
            problems.append(
                f"event {i}: transition {transition.id!r} enters {transition.to_state!r} "
                f"but the event records {event.state_id!r}"
            )
        try:
            held = eval_expression(transition.condition, prev.world_state)
        except IvyError as exc:
            held = False
            problems.append(f"event {i}: condition failed to evaluate: {exc}")
        if held is not True:
            problems.append(f"event {i}: condition of {transition.id!r} did not hold")
        try:
            reproduced = apply_actions(transition.actions, prev.world_state)
        except IvyError as exc:
            reproduced = None
            problems.append(f"event {i}: actions failed to evaluate: {exc}")
        if reproduced is not None and reproduced != dict(event.world_state):
            problems.append(f"event {i}: actions do not reproduce the recorded snapshot")
        frame[1] = transition.to_state

    if trace.outcome == "reached_end":
        while len(stack) > 1:
            frame_method, frame_state, _ = stack.pop()
            if frame_state not in frame_method.end_states:
                problems.append(
                    f"trace ends with sub-method {frame_method.id!r} in non-end state {frame_state!r}"
                )
        if stack and stack[-1][1] not in stack[-1][0].end_states:
            problems.append(
                f"outcome is reached_end but the final state {stack[-1][1]!r} is not an end state"
            )
    return problems


class TraceStore:
    """Minimal persistence interface; the concrete store lives in ivy.storage."""

    def save_trace(self, trace: DerivationalTrace) -> None:  # pragma: no cover
        raise NotImplementedError


# Wire format -----------------------------------------------------------------

def trace_to_dict(trace: DerivationalTrace) -> dict:
    return {
        "trace_id": trace.trace_id,
        "model_id": trace.model_id,
        "task_id": trace.task_id,
        "outcome": trace.outcome,
        "events": [
            {
                "step_index": e.step_index,
                "state_id": e.state_id,
                "transition_id": e.transition_id,
                "world_state": dict(e.world_state),
                "note": e.note,
                "depth": e.depth,
            }
            for e in trace.events
        ],
    }


def trace_from_dict(data: dict) -> DerivationalTrace:
    events = tuple(
        TraceEvent(
            step_index=e["step_index"],
            state_id=e["state_id"],
            transition_id=e.get("transition_id"),
            world_state=dict(e["world_state"]),
            note=e.get("note", ""),
            depth=e.get("depth", 0),
        )
        for e in data["events"]
    )
    return DerivationalTrace(
        trace_id=data["trace_id"],
        model_id=data["model_id"],
        task_id=data["task_id"],
        events=events,
        outcome=data["outcome"],
    )
