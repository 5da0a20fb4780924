"""Tests for subject-grouped stratified folds."""

from collections import Counter

import numpy as np
import pytest

from src.errors import TooFewSubjects
from src.harness.folds import assert_no_leakage, make_folds
from src.models.telemetry import Group
from src.models.training import FoldSplit


def _cohort(n_ctl: int, n_pd: int) -> list[tuple[str, Group]]:
    return [(f"C{i:03d}", Group.CTL) for i in range(n_ctl)] + [
        (f"P{i:03d}", Group.PD) for i in range(n_pd)
    ]


def test_balanced_cohort_gives_one_subject_per_class_per_fold() -> None:
    subjects = _cohort(10, 10)
    groups = dict(subjects)
    plan = make_folds(subjects, k=10, seed=4)
    for fold in plan.folds:
        assert len(fold) == 2
        assert Counter(groups[s] for s in fold) == {Group.CTL: 1, Group.PD: 1}


def test_unbalanced_cohort_sizes_differ_by_at_most_one() -> None:
    plan = make_folds(_cohort(42, 21), k=10, seed=0)
    sizes = sorted(len(fold) for fold in plan.folds)
    assert set(sizes) == {6, 7}
    assert sum(sizes) == 63
    assert plan.subjects == {s for s, _ in _cohort(42, 21)}


def test_repeated_recordings_count_once() -> None:
    subjects = _cohort(3, 3)
    plan = make_folds(subjects + subjects, k=3)
    assert sum(len(f) for f in plan.folds) == 6


def test_no_leakage_over_random_plans() -> None:
    """1000 plans over random cohorts and fold counts; three recordings per subject."""
    rng = np.random.default_rng(2024)
    for seed in range(1000):
        k = int(rng.integers(3, 11))
        n_ctl = int(rng.integers(1, 30))
        subjects = _cohort(n_ctl, int(rng.integers(max(1, k - n_ctl), 30)))
        recordings = [(subject_id, group) for subject_id, group in subjects for _ in range(3)]
        plan = make_folds(recordings, k=k, seed=seed)
        assert sorted(s for fold in plan.folds for s in fold) == sorted(s for s, _ in subjects)
        for split in plan.splits():
            assert not split.train & split.val
            assert not split.train & split.test
            assert not split.val & split.test
            assert split.train | split.val | split.test == plan.subjects
            for subject_id, _ in recordings:
                roles = [subject_id in split.train, subject_id in split.val, subject_id in split.test]
                assert sum(roles) == 1


def test_seed_changes_assignment() -> None:
    subjects = _cohort(10, 10)
    assert make_folds(subjects, 5, seed=1).folds == make_folds(subjects, 5, seed=1).folds
    assert make_folds(subjects, 5, seed=1).folds != make_folds(subjects, 5, seed=2).folds


def test_validation_fold_rotates() -> None:
    plan = make_folds(_cohort(6, 6), k=4, seed=0)
    for k in range(4):
        split = plan.split(k)
        assert split.test == frozenset(plan.folds[k])
        assert split.val == frozenset(plan.folds[(k + 1) % 4])
    assert plan.split(3).val == frozenset(plan.folds[0])


def test_too_few_subjects() -> None:
    with pytest.raises(TooFewSubjects) as excinfo:
        make_folds(_cohort(2, 2), k=5)
    assert excinfo.value.exit_code == 4


def test_overlapping_split_is_rejected() -> None:
    with pytest.raises(ValueError):
        FoldSplit(fold=0, train=frozenset({"a"}), val=frozenset({"a"}), test=frozenset({"b"}))


def test_leakage_check_flags_misplaced_subject() -> None:
    split = FoldSplit(fold=0, train=frozenset({"a"}), val=frozenset({"b"}), test=frozenset({"c"}))
    assert_no_leakage(split, {"train": {"a"}, "val": {"b"}, "test": {"c"}})
    with pytest.raises(AssertionError):
        assert_no_leakage(split, {"train": {"a", "c"}, "val": {"b"}, "test": {"c"}})
