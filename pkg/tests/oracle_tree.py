"""Brute-force minimal cut sets: try every leaf subset, keep the minimal
satisfying ones."""

from itertools import combinations

from tarakit.attack_tree import Gate


def satisfied(tree, node_id, active):
    node = tree.nodes[node_id]
    if not isinstance(node, Gate):
        return node_id in active
    results = [satisfied(tree, c, active) for c in node.children]
    return all(results) if node.gate == "AND" else any(results)


def minimal_cut_sets(tree):
    leaves = sorted(k for k, n in tree.nodes.items() if not isinstance(n, Gate))
    found = []
    for size in range(1, len(leaves) + 1):
        for combo in combinations(leaves, size):
            s = frozenset(combo)
            if any(f <= s for f in found):
                continue
            if satisfied(tree, tree.root, s):
                found.append(s)
    return sorted(found, key=lambda s: tuple(sorted(s)))
