"""Regenerate the river-crossing fixtures.

Writes fixtures/river.tmk.json (safe transition ordering, solves the puzzle
in 11 trips under first-enabled stepping) and fixtures/river-unsafe.tmk.json
(feasibility-only conditions with a greedy ordering that violates the safety
invariant on the first trip).

Usage: python tools/make_river_fixture.py
"""

from __future__ import annotations

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from ivy.model import (
    Action,
    KnowledgeEntity,
    Method,
    ParameterSpec,
    State,
    Task,
    TmkModel,
    Transition,
)
from ivy.parser import serialize_model

LOAD_PHRASES = {
    (2, 0): "two guards",
    (0, 2): "two prisoners",
    (1, 1): "one guard and one prisoner",
    (1, 0): "one guard",
    (0, 1): "one prisoner",
}

LOAD_IDS = {
    (2, 0): "two_guards",
    (0, 2): "two_prisoners",
    (1, 1): "guard_and_prisoner",
    (1, 0): "one_guard",
    (0, 1): "one_prisoner",
}

LR_ORDER = [(2, 0), (0, 2), (1, 1), (1, 0), (0, 1)]
RL_ORDER = [(0, 1), (1, 0), (1, 1), (0, 2), (2, 0)]

SAFETY = ["and",
          ["or", ["=", "left_guards", 0], [">=", "left_guards", "left_prisoners"]],
          ["or", ["=", "right_guards", 0], [">=", "right_guards", "right_prisoners"]]]


def minus(slot: str, amount: int):
    return ["-", slot, amount] if amount else slot


def plus(slot: str, amount: int):
    return ["+", slot, amount] if amount else slot


def safe_after(guards_expr, prisoners_expr):
    return ["or", ["=", guards_expr, 0], [">=", guards_expr, prisoners_expr]]


def feasibility(guards: int, prisoners: int, to_right: bool) -> list:
    side = "left" if to_right else "right"
    bank = "left" if to_right else "right"
    parts = [["=", "boat_side", ["enum", side]]]
    if guards:
        parts.append([">=", f"{bank}_guards", guards])
    if prisoners:
        parts.append([">=", f"{bank}_prisoners", prisoners])
    return parts


def move_condition(guards: int, prisoners: int, to_right: bool, with_safety: bool) -> list:
    parts = feasibility(guards, prisoners, to_right)
    if with_safety:
        if to_right:
            left_g, left_p = minus("left_guards", guards), minus("left_prisoners", prisoners)
            right_g, right_p = plus("right_guards", guards), plus("right_prisoners", prisoners)
        else:
            left_g, left_p = plus("left_guards", guards), plus("left_prisoners", prisoners)
            right_g, right_p = minus("right_guards", guards), minus("right_prisoners", prisoners)
        parts.append(safe_after(left_g, left_p))
        parts.append(safe_after(right_g, right_p))
    return ["and", *parts] if len(parts) > 1 else parts[0]


def move_actions(guards: int, prisoners: int, to_right: bool, finish: bool) -> tuple[Action, ...]:
    src, dst = ("left", "right") if to_right else ("right", "left")
    actions = []
    if guards:
        actions.append(Action(f"{src}_guards", ["-", f"{src}_guards", guards]))
        actions.append(Action(f"{dst}_guards", ["+", f"{dst}_guards", guards]))
    if prisoners:
        actions.append(Action(f"{src}_prisoners", ["-", f"{src}_prisoners", prisoners]))
        actions.append(Action(f"{dst}_prisoners", ["+", f"{dst}_prisoners", prisoners]))
    actions.append(Action("boat_side", ["enum", dst]))
    if finish:
        actions.append(Action("all_across", True))
    return tuple(actions)


def finish_transition(load: tuple[int, int]) -> Transition:
    guards, prisoners = load
    condition = ["and",
                 ["=", "boat_side", ["enum", "left"]],
                 ["=", "left_guards", guards],
                 ["=", "left_prisoners", prisoners]]
    return Transition(
        id=f"finish_{LOAD_IDS[load]}",
        from_state="select_load",
        to_state="complete",
        description=(f"Load the boat with the last {LOAD_PHRASES[load]}, move it to the "
                     "right bank, unload it, and complete the crossing."),
        condition=condition,
        actions=move_actions(guards, prisoners, to_right=True, finish=True),
    )


def crossing_transition(load: tuple[int, int], to_right: bool, with_safety: bool) -> Transition:
    guards, prisoners = load
    direction = "lr" if to_right else "rl"
    where = "to the right bank" if to_right else "back to the left bank"
    return Transition(
        id=f"{direction}_{LOAD_IDS[load]}",
        from_state="select_load",
        to_state="select_load",
        description=(f"Load the boat with {LOAD_PHRASES[load]}, move it {where}, "
                     "unload it, and check for a constraint violation."),
        condition=move_condition(guards, prisoners, to_right, with_safety),
        actions=move_actions(guards, prisoners, to_right, finish=False),
    )


def build_task() -> Task:
    count = lambda name: ParameterSpec(
        name=name,
        value_kind="integer",
        constraint=["and", [">=", name, 0], ["<=", name, 3]],
    )
    return Task(
        id="transport",
        name="Transport All Individuals Across the River",
        description=("Move every guard and prisoner from the left bank to the right "
                     "bank using the boat, without ever leaving prisoners outnumbering "
                     "guards on a bank where at least one guard is present."),
        givens=(
            count("left_guards"),
            count("left_prisoners"),
            count("right_guards"),
            count("right_prisoners"),
            ParameterSpec(name="boat_side", value_kind="enum", enum_values=("left", "right")),
        ),
        makes=(
            ParameterSpec(name="all_across", value_kind="boolean", constraint="all_across"),
        ),
    )


def build_knowledge() -> tuple[KnowledgeEntity, ...]:
    return (
        KnowledgeEntity(
            id="guards",
            name="Guards",
            kind="concept",
            description=(
                "In the river crossing problem, the guards are one of the individuals "
                "who need to be transported across the river. Guards keep order on "
                "each bank while the crossing is underway, and a bank where guards "
                "are outnumbered is unsafe unless no guard is present."
            ),
            properties={"count": "integer"},
            relations=(("watch over", "prisoners"),),
        ),
        KnowledgeEntity(
            id="prisoners",
            name="Prisoners",
            kind="concept",
            description=(
                "Prisoners are the second group taken across the water. They may "
                "outnumber their escorts on a bank only at great risk, so every trip "
                "keeps both banks balanced."
            ),
            properties={"count": "integer"},
            relations=(),
        ),
        KnowledgeEntity(
            id="boat",
            name="Boat",
            kind="object",
            description=(
                "The boat carries at most two occupants per trip and needs at least "
                "one occupant to move. Its side of the river determines which bank "
                "may load it next."
            ),
            properties={"capacity": "integer", "side": "enum"},
            relations=(),
        ),
        KnowledgeEntity(
            id="relationships",
            name="Relationships",
            kind="relation",
            description=(
                "They play a crucial role in ensuring that the prisoners do not "
                "escape during the crossing. The relationship between guards and "
                "prisoners constrains every trip: a bank where any guard is present "
                "must never hold more prisoners than guards."
            ),
            properties={},
            relations=(("constrains", "guards"), ("constrains", "prisoners")),
        ),
    )


def build_model(safe: bool) -> TmkModel:
    states = (
        State(id="select_load", name="Select Boat Load",
              description="Choose which individuals board the boat for the next trip."),
        State(id="complete", name="Crossing Complete",
              description="Everyone has arrived on the right bank."),
    )
    if safe:
        transitions = (
            [finish_transition(load) for load in LR_ORDER]
            + [crossing_transition(load, to_right=True, with_safety=True) for load in LR_ORDER]
            + [crossing_transition(load, to_right=False, with_safety=True) for load in RL_ORDER]
        )
    else:
        # Greedy feasibility-only ordering: two guards leave first and strand
        # the prisoners with too few guards, tripping the invariant at once.
        transitions = (
            [crossing_transition(load, to_right=True, with_safety=False) for load in LR_ORDER]
            + [crossing_transition(load, to_right=False, with_safety=False) for load in RL_ORDER]
            + [finish_transition(load) for load in LR_ORDER]
        )
    method = Method(
        id="transport_method",
        task_ref="transport",
        description=("Ferry individuals across in repeated boat trips, always choosing "
                     "the first workable load, until everyone reaches the right bank."),
        states=states,
        transitions=tuple(transitions),
        start_state="select_load",
        end_states=frozenset({"complete"}),
        invariant=SAFETY,
    )
    suffix = "" if safe else " (Unsafe Ordering)"
    return TmkModel(
        id="river" if safe else "river-unsafe",
        title="River Crossing Problem" + suffix,
        description=("Three guards and three prisoners must cross a river in a boat "
                     "that holds two. Prisoners may never outnumber guards on a bank "
                     "where at least one guard is present."),
        tasks=(build_task(),),
        methods=(method,),
        knowledge=build_knowledge(),
        default_initial={
            "left_guards": 3,
            "left_prisoners": 3,
            "right_guards": 0,
            "right_prisoners": 0,
            "boat_side": "left",
            "all_across": False,
        },
    )


def main() -> None:
    fixtures = Path(__file__).resolve().parents[1] / "fixtures"
    fixtures.mkdir(exist_ok=True)
    for safe, filename in ((True, "river.tmk.json"), (False, "river-unsafe.tmk.json")):
        model = build_model(safe)
        path = fixtures / filename
        path.write_text(serialize_model(model), encoding="utf-8")
        print(f"wrote {path}")


if __name__ == "__main__":
    main()
