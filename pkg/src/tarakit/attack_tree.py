"""AND/OR attack trees, attack path (minimal cut set) enumeration and
feasibility propagation from CVSS-scored leaves."""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING, Union

from .cvss import Score, temporal_score

if TYPE_CHECKING:
    from .model import SecurityModel

GATES = ("AND", "OR")


class TreeStructureError(ValueError):
    pass


class UnscoredLeafError(ValueError):
    def __init__(self, leaf: str, reason: str):
        super().__init__(f"leaf {leaf!r} cannot be scored: {reason}")
        self.leaf = leaf


@dataclass(frozen=True)
class Gate:
    label: str
    gate: str
    children: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "children", tuple(self.children))
        if self.gate not in GATES:
            raise TreeStructureError(f"unknown gate type {self.gate!r}")


@dataclass(frozen=True)
class Leaf:
    label: str
    threat: int | None = None


Node = Union[Gate, Leaf]


@dataclass(frozen=True)
class AttackTree:
    id: str
    root: str
    nodes: dict[str, Node]

    def structure_errors(self) -> list[str]:
        """Every violation of the single-root, single-parent, acyclic shape."""
        errors = []
        if self.root not in self.nodes:
            return [f"root {self.root!r} is not a node"]
        parents: dict[str, str] = {}
        for node_id, node in sorted(self.nodes.items()):
            if isinstance(node, Gate):
                if not node.children:
                    errors.append(f"gate {node_id!r} has no children")
                for child in node.children:
                    if child not in self.nodes:
                        errors.append(f"gate {node_id!r} references unknown node {child!r}")
                    elif child in parents:
                        errors.append(f"node {child!r} has more than one parent")
                    else:
                        parents[child] = node_id
        if self.root in parents:
            errors.append(f"root {self.root!r} has a parent")
        # walk from the root; anything unreached is orphaned or on a cycle
        reached, stack = set(), [self.root]
        while stack:
            node_id = stack.pop()
            if node_id in reached:
                continue
            reached.add(node_id)
            node = self.nodes.get(node_id)
            if isinstance(node, Gate):
                stack.extend(c for c in node.children if c in self.nodes)
        for node_id in sorted(set(self.nodes) - reached):
            errors.append(f"node {node_id!r} is not reachable from the root")
        return errors

    def check(self) -> None:
        errors = self.structure_errors()
        if errors:
            raise TreeStructureError(f"attack tree {self.id!r}: " + "; ".join(errors))

    def leaves(self) -> dict[str, Leaf]:
        return {k: n for k, n in self.nodes.items() if isinstance(n, Leaf)}


@dataclass(frozen=True)
class AttackPath:
    """A minimal set of leaves whose joint success achieves the root goal."""

    leaves: frozenset[str]

    @property
    def sort_key(self) -> tuple[str, ...]:
        return tuple(sorted(self.leaves))

    def __str__(self) -> str:
        return "{" + ", ".join(self.sort_key) + "}"


def minimize(family) -> list[frozenset[str]]:
    """Drop duplicates and any set that strictly contains another member."""
    kept: list[frozenset[str]] = []
    for candidate in sorted(set(family), key=lambda s: (len(s), sorted(s))):
        if not any(k <= candidate for k in kept):
            kept.append(candidate)
    return kept


def enumerate_paths(tree: AttackTree) -> list[AttackPath]:
    tree.check()

    def cut_sets(node_id: str) -> list[frozenset[str]]:
        node = tree.nodes[node_id]
        if isinstance(node, Leaf):
            return [frozenset([node_id])]
        child_families = [cut_sets(c) for c in node.children]
        if node.gate == "OR":
            return minimize(s for fam in child_families for s in fam)
        combined = [frozenset()]
        for fam in child_families:
            combined = minimize(acc | s for acc in combined for s in fam)
        return combined

    paths = [AttackPath(s) for s in cut_sets(tree.root)]
    return sorted(paths, key=lambda p: p.sort_key)


def leaf_score(tree: AttackTree, leaf_id: str, model: SecurityModel) -> Score:
    leaf = tree.nodes.get(leaf_id)
    if not isinstance(leaf, Leaf):
        raise UnscoredLeafError(leaf_id, "not a leaf of this tree")
    if leaf.threat is None:
        raise UnscoredLeafError(leaf_id, "no threat reference")
    try:
        threat = model.threat_by_id(leaf.threat)
    except KeyError:
        raise UnscoredLeafError(leaf_id, f"threat {leaf.threat} not in model") from None
    return temporal_score(threat.metrics)


def path_feasibility(path: AttackPath, tree: AttackTree, model: SecurityModel) -> Score:
    """Weakest link: a path is only as feasible as its hardest step."""
    if not path.leaves:
        raise ValueError("empty attack path has no feasibility")
    return min(leaf_score(tree, leaf_id, model) for leaf_id in path.sort_key)


@dataclass(frozen=True)
class GoalFeasibility:
    score: Score
    best_path: AttackPath


def goal_feasibility(tree: AttackTree, model: SecurityModel) -> GoalFeasibility:
    """Easiest path wins; ties go to the lexicographically smallest path."""
    best = None
    for path in enumerate_paths(tree):
        score = path_feasibility(path, tree, model)
        if best is None or score > best.score:
            best = GoalFeasibility(score, path)
    return best
