import random
import warnings

import pytest

from psifw.kapranov import PsiSpec
from psifw.trees import MarkedTree, MetricTree, normalize_side


def build_metric(n, split_lengths):
    """MetricTree on [n] from {sorted-split-tuple: length} pairs."""
    legs = frozenset(range(1, n + 1))
    table = {normalize_side(s, legs): v for s, v in split_lengths.items()}
    tree = MarkedTree.from_splits(range(1, n + 1), table)
    return MetricTree.build(tree, table)


@pytest.fixture
def worked_specs():
    """The 6-leg, base-10 configuration with three pulled-back classes."""
    n, B = 6, 10
    return n, B, [
        PsiSpec.build(range(1, 7), 2, 4, 1, n, B),
        PsiSpec.build([1, 3, 4, 6], 3, 1, 2, n, B),
        PsiSpec.build([1, 2, 4, 5, 6], 5, 4, 3, n, B),
    ]


@pytest.fixture
def worked_levels(worked_specs):
    from psifw.firework import firework_run

    n, B, specs = worked_specs
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return firework_run(n, specs, B)


@pytest.fixture
def final_tree_one():
    """The caterpillar with splits {2,3},{2,3,6},{2,3,5,6} and lengths 180,19,1."""
    return build_metric(6, {(2, 3): 180, (2, 3, 6): 19, (2, 3, 5, 6): 1})


@pytest.fixture
def final_tree_two():
    return build_metric(6, {(2, 3): 180, (2, 3, 5, 6): 20, (5, 6): 4})


def random_config(rng: random.Random, n: int, m: int):
    """Random list of m valid class dicts on [n]."""
    classes = []
    for _ in range(m):
        size = rng.randint(3, n)
        S = sorted(rng.sample(range(1, n + 1), size))
        i, j = rng.sample(S, 2)
        classes.append({"S": S, "i": i, "j": j})
    return classes
