import pytest

from boxensemble import SyntheticConfig, dataset_score, generate_benchmark, write_predictions_csv
from boxensemble.io import write_ground_truth_csv


def test_noiseless_models_are_perfect():
    cfg = SyntheticConfig(images=60, models=3, seed=3, jitter=0, drop_rate=0, spurious_rate=0)
    gts, sets = generate_benchmark(cfg)
    for s in sets:
        assert dataset_score(s, gts).mc_dataset == 1.0


def test_same_seed_same_bytes():
    cfg = SyntheticConfig(images=50, seed=9)
    (g1, s1), (g2, s2) = generate_benchmark(cfg), generate_benchmark(cfg)
    assert write_ground_truth_csv(g1) == write_ground_truth_csv(g2)
    assert [write_predictions_csv(s) for s in s1] == [write_predictions_csv(s) for s in s2]


def test_adding_models_keeps_truth_and_earlier_models():
    g2, s2 = generate_benchmark(SyntheticConfig(images=40, models=2, seed=5))
    g4, s4 = generate_benchmark(SyntheticConfig(images=40, models=4, seed=5))
    assert g2 == g4
    assert [write_predictions_csv(s) for s in s2] == [write_predictions_csv(s) for s in s4[:2]]


def test_positive_fraction_and_ids():
    gts, sets = generate_benchmark(SyntheticConfig(images=200, positives_fraction=0.25, seed=1))
    assert sum(1 for v in gts.entries.values() if v) == 50
    assert sorted(gts.entries) == list(gts.entries)
    assert all(set(s.entries) == set(gts.entries) for s in sets)


@pytest.mark.parametrize(
    "kwargs",
    [{"images": -1}, {"models": 0}, {"positives_fraction": 1.5}, {"jitter": -1}, {"drop_rate": 2}],
)
def test_invalid_config(kwargs):
    with pytest.raises(ValueError):
        SyntheticConfig(**kwargs)
