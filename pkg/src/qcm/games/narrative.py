"""Branching story: six quest scenes and a closing scene.

Each quest is settled by one card answer. A failed quest is not retried
in the same playthrough; the story always reaches its ending, whose grade
is the number of successful quests.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

SCENE_COUNT = 7
QUEST_COUNT = SCENE_COUNT - 1


class NarrativeError(Exception):
    pass


@dataclass(frozen=True)
class NarrativeState:
    scene: int = 1
    quest_results: tuple[bool, ...] = ()
    ended: bool = False

    @property
    def ending_grade(self) -> int:
        return sum(self.quest_results)

    @property
    def in_final_scene(self) -> bool:
        return self.scene == SCENE_COUNT


def narrative_advance(state: NarrativeState, quest_outcome: bool) -> NarrativeState:
    if state.ended:
        raise NarrativeError("story already ended")
    results = state.quest_results + (bool(quest_outcome),)
    scene = state.scene + 1
    return replace(state, scene=scene, quest_results=results, ended=scene == SCENE_COUNT)
