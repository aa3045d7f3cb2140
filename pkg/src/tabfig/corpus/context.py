"""Depth-stratified context retrieval over the reference graph.

Level i holds the elements first reached at distance i from the target,
expanding frontier by frontier over referring and referred neighbors with
a visited set initialized to the target itself. Levels are therefore
pairwise disjoint and never contain the target.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..document.model import ReferenceGraph
from ..errors import UnknownTarget


@dataclass
class ContextSet:
    """Hierarchical context levels C_1..C_d for one target element."""

    target: str
    levels: list[set[str]]

    @property
    def depth(self) -> int:
        return len(self.levels)

    def all_ids(self) -> set[str]:
        out: set[str] = set()
        for level in self.levels:
            out |= level
        return out


def retrieve_context(graph: ReferenceGraph, target: str, d: int) -> ContextSet:
    """Collect d levels of bidirectional reference context around ``target``."""
    if target not in graph.nodes:
        raise UnknownTarget(target)
    if d < 0:
        raise ValueError("depth must be >= 0")

    visited = {target}
    frontier = {target}
    levels: list[set[str]] = []
    for _ in range(d):
        next_frontier: set[str] = set()
        for element in frontier:
            for neighbor in graph.referring(element) | graph.referred(element):
                if neighbor not in visited:
                    next_frontier.add(neighbor)
                    visited.add(neighbor)
        levels.append(next_frontier)
        frontier = next_frontier
    return ContextSet(target=target, levels=levels)
