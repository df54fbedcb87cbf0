import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mdlrules import RuleList, cover, estimate_theta
from mdlrules.rulelist import ModelFormatError, Rule, from_machine, to_machine, to_text

from conftest import dataset_from_matrix, random_dataset, small_datasets


def naive_usages(patterns, dataset):
    """Walk every instance through the list by hand."""
    X = dataset.to_matrix()
    out = np.zeros((len(patterns) + 1, dataset.num_classes), dtype=int)
    for x, y in zip(X, dataset.labels):
        slot = next((i for i, p in enumerate(patterns) if all(x[j] for j in p)), len(patterns))
        out[slot, y] += 1
    return out


def test_zoo_usages(zoo, zoo_patterns):
    rl = RuleList.build(zoo_patterns, zoo)
    assert cover(rl, zoo).usages.tolist() == [18, 14, 20, 8, 41]
    names = zoo.class_names
    first = dict(zip(names, rl.rules[0].usage))
    assert first["invertebrate"] == 10 and first["insect"] == 8


def test_empty_list_covers_everything(zoo):
    rl = RuleList.build([], zoo)
    assert len(rl) == 0
    assert cover(rl, zoo).blocks == (zoo.all_mask,)
    assert np.array_equal(rl.default_usage, zoo.class_counts)


def test_nested_rule_gets_the_leftovers():
    rng = np.random.default_rng(4)
    d = random_dataset(rng, 80, 4, 2)
    rl = RuleList.build([(0,), (0, 1)], d)
    overlap = (d.pattern_cover((0, 1)) & d.pattern_cover((0,))).bit_count()
    assert rl.rules[1].total_usage == d.pattern_cover((0, 1)).bit_count() - overlap == 0


@given(small_datasets(max_items=6), st.data())
@settings(max_examples=60, deadline=None)
def test_cover_matches_naive_scan(d, data):
    items = st.lists(st.integers(0, d.num_items - 1), min_size=1, max_size=3, unique=True)
    patterns = data.draw(st.lists(items, max_size=5))
    rl = RuleList.build(patterns, d)
    part = cover(rl, d)
    assert np.array_equal(part.class_usages(d), naive_usages(rl.patterns, d))
    union = 0
    for b in part.blocks:
        assert union & b == 0
        union |= b
    assert union == d.all_mask
    assert np.array_equal(rl.assign(d), rl.assign_matrix(d.to_matrix()))


def test_theta_examples():
    assert estimate_theta([10, 8, 0, 0, 0, 0, 0]) == pytest.approx(
        np.array([11, 9, 1, 1, 1, 1, 1]) / 25)
    assert estimate_theta([0, 0, 0, 0]) == pytest.approx([0.25] * 4)
    assert estimate_theta([5, 5]) == pytest.approx([0.5, 0.5])
    assert estimate_theta([3, 1], 0.5) == pytest.approx([3.5 / 5, 1.5 / 5])
    with pytest.raises(ValueError):
        estimate_theta([1, 1], 0)


def test_prediction_on_zoo(zoo, zoo_patterns):
    rl = RuleList.build(zoo_patterns, zoo)
    X = zoo.to_matrix()
    no_backbone = int(np.flatnonzero(X[:, zoo_patterns[0][0]])[0])
    assert np.array_equal(rl.predict_proba(X[no_backbone]), rl.rules[0].theta)
    nothing = np.zeros(zoo.num_items, dtype=bool)
    assert np.array_equal(rl.predict_proba(nothing), rl.default_theta)
    with pytest.raises(ValueError):
        rl.predict_proba(np.zeros(3))


def test_first_match_wins():
    X = np.array([[1, 1], [1, 0], [0, 1], [0, 0]] * 3, dtype=bool)
    d = dataset_from_matrix(X, [0, 1, 0, 1] * 3)
    rl = RuleList.build([(0,), (1,)], d)
    assert np.array_equal(rl.predict_proba(np.array([1, 1])), rl.rules[0].theta)


def test_crisp_prediction_ties_and_argmax():
    def single(theta):
        theta = np.array(theta)
        return RuleList((), np.zeros(len(theta), dtype=int), theta, (), tuple("abc"[:len(theta)]))

    assert single([0.93, 0.07]).predict(np.zeros(0)) == 0
    assert single([0.5, 0.5]).predict(np.zeros(0)) == 0
    assert single([0.2, 0.5, 0.3]).predict(np.zeros(0)) == 1


def test_text_listing(zoo, zoo_patterns):
    text = to_text(RuleList.build(zoo_patterns, zoo))
    lines = text.splitlines()
    assert lines[0].split() == ["rule", "antecedent", "consequent", "usage"]
    assert lines[1].startswith("1") and "IF {backbone = 0} THEN" in lines[1]
    assert "ELSE IF {breathes = 0} THEN" in text
    assert "Pr(fish) = 0.67" in text
    assert lines[-1].split()[:2] == ["default", "ELSE"]
    assert lines[-1].endswith("41")
    usages = [int(line.split()[-1]) for line in lines[1:]]
    assert sum(usages) == zoo.n


def random_rulelist(rng, d):
    patterns = [tuple(rng.choice(d.num_items, size=int(rng.integers(1, 3)), replace=False))
                for _ in range(int(rng.integers(0, 5)))]
    return RuleList.build(patterns, d, epsilon=float(rng.choice([1.0, 0.5])))


def test_machine_round_trip():
    rng = np.random.default_rng(8)
    for _ in range(30):
        d = random_dataset(rng, 50, 6, int(rng.integers(2, 5)))
        rl = random_rulelist(rng, d)
        again = from_machine(to_machine(rl))
        assert again == rl
        assert to_machine(again) == to_machine(rl)


def test_machine_errors(zoo, zoo_patterns):
    doc = json.loads(to_machine(RuleList.build(zoo_patterns, zoo)))
    with pytest.raises(ModelFormatError, match="JSON"):
        from_machine("{not json")
    with pytest.raises(ModelFormatError):
        from_machine(json.dumps({"format": "other"}))
    no_default = dict(doc)
    del no_default["default"]
    with pytest.raises(ModelFormatError, match="default"):
        from_machine(json.dumps(no_default))
    bad_theta = json.loads(json.dumps(doc))
    bad_theta["rules"][0]["theta"][0] += 0.01
    with pytest.raises(ModelFormatError, match="disagree"):
        from_machine(json.dumps(bad_theta))
    bad_item = json.loads(json.dumps(doc))
    bad_item["rules"][0]["items"] = [99]
    with pytest.raises(ModelFormatError):
        from_machine(json.dumps(bad_item))
    short = json.loads(json.dumps(doc))
    short["rules"][0]["usage"] = [1, 2]
    with pytest.raises(ModelFormatError):
        from_machine(json.dumps(short))
    missing_key = json.loads(json.dumps(doc))
    del missing_key["rules"][1]["usage"]
    with pytest.raises(ModelFormatError):
        from_machine(json.dumps(missing_key))


def test_rule_equality():
    a = Rule.from_usage((2, 1), [3, 4])
    assert a.pattern == (1, 2)
    assert a == Rule.from_usage((1, 2), [3, 4])
    assert a != Rule.from_usage((1, 2), [4, 3])
    assert a.total_usage == 7


@given(st.lists(st.integers(0, 1000), min_size=2, max_size=10),
       st.sampled_from([0.1, 1.0, 5.0]))
def test_theta_is_a_strictly_positive_distribution(usage, eps):
    theta = estimate_theta(usage, eps)
    assert (theta > 0).all() and (theta < 1).all()
    assert theta.sum() == pytest.approx(1.0)
