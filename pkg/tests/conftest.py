import random
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from tarakit.attack_tree import AttackTree, Gate, Leaf  # noqa: E402
from tarakit.io import bundled, load_event, load_model  # noqa: E402

DATA = Path(__file__).parent / "data"


@pytest.fixture
def ivi_v1():
    return load_model(bundled("ivi-v1.json"))


@pytest.fixture
def ivi_v2():
    return load_model(bundled("ivi-v2.json"))


@pytest.fixture
def jailbreak():
    return load_event(bundled("tesla-jailbreak-event.json"))


def random_tree(rng: random.Random, max_leaves: int = 12) -> AttackTree:
    """Random AND/OR tree with between 1 and ``max_leaves`` leaves."""
    n_leaves = rng.randint(1, max_leaves)
    nodes = {}
    pending = [f"L{i:02d}" for i in range(n_leaves)]
    for leaf_id in pending:
        nodes[leaf_id] = Leaf(leaf_id)
    gate_no = 0
    while len(pending) > 1:
        k = rng.randint(1, min(4, len(pending)))
        rng.shuffle(pending)
        children, pending = pending[:k], pending[k:]
        gate_id = f"G{gate_no:02d}"
        gate_no += 1
        nodes[gate_id] = Gate(gate_id, rng.choice(["AND", "OR"]), tuple(children))
        pending.append(gate_id)
    if rng.random() < 0.3:
        # unary gate on top
        nodes["TOP"] = Gate("TOP", rng.choice(["AND", "OR"]), (pending[0],))
        pending = ["TOP"]
    return AttackTree("random", pending[0], nodes)
