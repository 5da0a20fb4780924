"""Subject-grouped, class-stratified fold assignment."""

from collections import defaultdict
from collections.abc import Iterable

import numpy as np

from src.errors import TooFewSubjects
from src.models.telemetry import Group
from src.models.training import FoldPlan, FoldSplit


def make_folds(subjects: Iterable[tuple[str, Group]], k: int = 10, seed: int = 0) -> FoldPlan:
    """
    Deal subjects into ``k`` folds.

    Each group's subjects are shuffled with the seeded generator and dealt round-robin;
    the deal position carries over from one group to the next so fold sizes differ by at
    most one overall as well as within each group.

    Raises:
        TooFewSubjects: fewer distinct subjects than folds
    """
    by_group: dict[Group, list[str]] = defaultdict(list)
    seen: set[str] = set()
    for subject_id, group in subjects:
        if subject_id not in seen:
            seen.add(subject_id)
            by_group[group].append(subject_id)
    if len(seen) < k:
        raise TooFewSubjects(f"{len(seen)} subjects cannot fill {k} folds", subjects=len(seen), k=k)

    rng = np.random.default_rng(seed)
    folds: list[list[str]] = [[] for _ in range(k)]
    position = 0
    for group in sorted(by_group, key=lambda g: g.value):
        members = sorted(by_group[group])
        for index in rng.permutation(len(members)):
            folds[position % k].append(members[index])
            position += 1
    return FoldPlan(folds=folds, seed=seed)


def assert_no_leakage(split: FoldSplit, subjects_by_role: dict[str, set[str]]) -> None:
    """Check the subjects actually used in each role against the split."""
    train, val, test = (subjects_by_role[r] for r in ("train", "val", "test"))
    if train & val or train & test or val & test:
        raise AssertionError(f"fold {split.fold}: subject leakage between train/val/test")
    if not (train <= split.train and val <= split.val and test <= split.test):
        raise AssertionError(f"fold {split.fold}: samples assigned outside their fold")
