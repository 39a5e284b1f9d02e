from collections.abc import Sequence
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction

Weight = float | Fraction


class FamilyKind(str, Enum):
    IN_TREES = "in_trees"
    SAME_TREE = "same_tree"
    SPLIT = "split"
    TWO_TREE = "two_tree"
    GRADED = "graded"
    GRADED_SAME = "graded_same"


@dataclass(frozen=True, slots=True)
class ForestFamily:
    """Descriptor of a forest family.

    ``IN_TREES``: spanning in-trees rooted at ``y``.
    ``SAME_TREE``: two-tree forests with ``x`` in the tree rooted at ``y``.
    ``SPLIT``: two-tree forests with ``y`` a root and ``x`` in the other tree.
    ``TWO_TREE``: every two-tree forest.
    ``GRADED``: rooted forests with ``m`` arcs.
    ``GRADED_SAME``: forests with ``m`` arcs, ``x`` in the tree rooted at ``y``.
    """

    kind: FamilyKind
    x: str | None = None
    y: str | None = None
    m: int | None = None

    def label(self) -> str:
        parts = [self.kind.value]
        if self.x is not None:
            parts.append(f"x={self.x}")
        if self.y is not None:
            parts.append(f"y={self.y}")
        if self.m is not None:
            parts.append(f"m={self.m}")
        return " ".join(parts)


@dataclass(frozen=True, slots=True)
class RootedForest:
    """Spanning forest of in-trees.

    Every non-root state has exactly one outgoing arc; following outgoing
    arcs from any state ends at the root of its component.
    """

    arcs: tuple[tuple[str, str], ...]
    roots: tuple[str, ...]
    components: tuple[tuple[str, ...], ...]
    weight: Weight

    def root_of(self, state: str) -> str:
        parent = dict(self.arcs)
        seen = {state}
        while state in parent:
            state = parent[state]
            if state in seen:
                break
            seen.add(state)
        return state

    def is_valid(self, states: Sequence[str]) -> bool:
        parent: dict[str, str] = {}
        for source, target in self.arcs:
            if source in parent or source == target:
                return False
            parent[source] = target
        if set(self.roots) != set(states) - set(parent):
            return False
        covered = [s for component in self.components for s in component]
        if sorted(covered) != sorted(states):
            return False
        for root, component in zip(self.roots, self.components, strict=True):
            for state in component:
                steps = 0
                while state in parent:
                    state = parent[state]
                    steps += 1
                    if steps > len(states):
                        return False
                if state != root:
                    return False
        return True


@dataclass(frozen=True, slots=True)
class ForestEnsemble:
    family: ForestFamily
    total_weight: Weight
    count: int
    members: tuple[RootedForest, ...] | None = None
