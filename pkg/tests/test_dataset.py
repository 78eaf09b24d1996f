import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from scalelab.dataset import (
    RunDataset,
    RunRecord,
    load_runs,
    parse_number,
    reference_dataset,
    save_runs,
    total_compute,
)
from scalelab.errors import DataValueError, MissingField, ParseError, SchemaError

from .conftest import SPLITS

HEADER = "model_label,total_params,trainable_params,forward_gmacs,per_sample_gmacs,seen_samples,initial_loss,split,test_loss\n"


def test_total_compute_examples():
    r = RunRecord("a", 4e8, 512_000, 10.44, {"SC": 1.0}, per_sample_gmacs=62.1)
    assert total_compute(r) == pytest.approx(3.17952e16, rel=1e-12)
    r = RunRecord("b", 1.12e10, 10_240_000, 6.02, {"SC": 1.0}, per_sample_gmacs=1494.5)
    assert total_compute(r) == pytest.approx(1.530368e19, rel=1e-12)


def test_total_compute_needs_cost():
    r = RunRecord("a", 4e8, 512_000, 10.44, {"SC": 1.0})
    with pytest.raises(MissingField):
        total_compute(r)


@settings(max_examples=50, deadline=None)
@given(st.floats(1e-3, 1e5), st.integers(1, 10**9))
def test_total_compute_homogeneous_in_samples(g, s):
    a = RunRecord("a", 1e9, s, 2.0, {"x": 1.0}, per_sample_gmacs=g)
    b = RunRecord("a", 1e9, 2 * s, 2.0, {"x": 1.0}, per_sample_gmacs=g)
    assert total_compute(b) == 2 * total_compute(a)


def test_derived_cost_identity_factor():
    r = RunRecord("a", 4e8, 512_000, 10.44, {"SC": 1.0}, trainable_params=0, forward_gmacs=62.1)
    assert r.per_sample_gmacs == pytest.approx(62.1)
    r = RunRecord("a", 4e8, 512_000, 10.44, {"SC": 1.0}, trainable_params=4e8, forward_gmacs=10)
    assert r.per_sample_gmacs == pytest.approx(20.0)


def test_json_derives_cost(tmp_path):
    path = tmp_path / "runs.json"
    path.write_text(json.dumps([{
        "model_label": "0.4B", "total_params": 4e8, "trainable_params": 0,
        "forward_gmacs": "62.1G", "seen_samples": 512000, "initial_loss": 10.44,
        "losses": {"SC": 1.92},
    }]))
    ds = load_runs(path)
    assert ds[0].per_sample_gmacs == pytest.approx(62.1)


@pytest.mark.parametrize("kwargs", [
    {"total_params": 0},
    {"initial_loss": -1},
    {"seen_samples": 0},
    {"losses": {}},
    {"losses": {"SC": 0.0}},
    {"losses": {"": 1.0}},
    {"trainable_params": 5e9},
    {"model_label": ""},
])
def test_record_validation(kwargs):
    base = dict(model_label="a", total_params=1e9, seen_samples=10, initial_loss=2.0, losses={"SC": 1.0})
    base.update(kwargs)
    with pytest.raises(DataValueError):
        RunRecord(**base)


def test_negative_loss_in_csv(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text(HEADER + "a,1e9,,,10,100,2.0,SC,-1\n")
    with pytest.raises(ValueError):
        load_runs(path)


def test_parse_error_reports_line(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text(HEADER + "a,1e9,,,10,100,2.0,SC,1\nb,1e9,,,10,abc,2.0,SC,1\n")
    with pytest.raises(ParseError) as info:
        load_runs(path)
    assert info.value.line == 3


def test_missing_column(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("model_label,total_params,split,test_loss\na,1,SC,1\n")
    with pytest.raises(SchemaError):
        load_runs(path)


def test_malformed_json(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("[{]")
    with pytest.raises(ParseError):
        load_runs(path)


def test_parse_number_suffixes():
    assert parse_number("0.4B") == 4e8
    assert parse_number("62.1G") == pytest.approx(62.1e9)
    assert parse_number("5.1M") == pytest.approx(5.1e6)
    assert parse_number("512000") == 512000


def test_reference_rows(ref):
    assert len(ref) == 16
    assert sorted({r.total_params for r in ref}) == [4e8, 1e9, 3.5e9, 1.12e10]
    assert sorted({r.seen_samples for r in ref}) == [512_000, 2_048_000, 5_120_000, 10_240_000]
    assert sorted({r.per_sample_gmacs for r in ref}) == [62.1, 170.6, 488.8, 1494.5]
    assert ref[0].losses == {"SC": 1.92, "ST": 4.20, "UC": 5.11}
    assert ref[15].losses == {"SC": 0.87, "ST": 1.65, "UC": 2.88}
    assert all(r.initial_loss == 5.85 for r in ref if r.total_params == 3.5e9)
    # the 1.0B block is printed out of sample order
    assert [r.seen_samples for r in ref[4:8]] == [512_000, 5_120_000, 2_048_000, 10_240_000]
    assert ref.splits == SPLITS


def test_reference_costs_distinct(ref):
    costs = [total_compute(r) for r in ref]
    assert all(c > 0 for c in costs)
    assert len(set(costs)) == 16


def test_sorted_order(ref):
    s = ref.sorted()
    keys = [(r.total_params, r.seen_samples) for r in s]
    assert keys == sorted(keys)
    assert reference_dataset("sorted").records == s.records


@pytest.mark.parametrize("split", ["SC", "ST"])
def test_seen_split_losses_non_increasing_in_samples(ref, split):
    for size in {r.total_params for r in ref}:
        rows = sorted((r for r in ref if r.total_params == size), key=lambda r: r.seen_samples)
        losses = [r.loss(split) for r in rows]
        assert all(a >= b for a, b in zip(losses, losses[1:])), (split, size, losses)


def test_unseen_split_is_not_monotone(ref):
    # UC loss rises again at the largest sample count for several sizes
    rows = sorted((r for r in ref if r.total_params == 4e8), key=lambda r: r.seen_samples)
    assert rows[-1].loss("UC") > rows[-2].loss("UC")


def test_unknown_split(ref):
    with pytest.raises(MissingField):
        ref.with_split("XX")
    with pytest.raises(MissingField):
        ref[0].loss("XX")


@pytest.mark.parametrize("fmt", ["csv", "json"])
def test_round_trip_reference(ref, tmp_path, fmt):
    path = tmp_path / f"runs.{fmt}"
    save_runs(ref, path)
    back = load_runs(path)
    assert back.records == ref.records


records = st.builds(
    lambda label, p, frac, g, s, t, losses: RunRecord(
        label, p, s, t, losses, trainable_params=p * frac, forward_gmacs=g
    ),
    st.text(alphabet="abcdefXYZ0123456789.", min_size=1, max_size=6),
    st.floats(1e3, 1e12),
    st.floats(0, 1),
    st.floats(1e-2, 1e4),
    st.integers(1, 10**8).map(float),
    st.floats(0.01, 20),
    st.dictionaries(st.sampled_from(["SC", "ST", "UC", "x1"]), st.floats(1e-3, 50), min_size=1),
)


@settings(max_examples=40, deadline=None)
@given(st.lists(records, min_size=1, max_size=8, unique_by=lambda r: r.model_label))
def test_round_trip_property(tmp_path_factory, recs):
    ds = RunDataset(tuple(recs))
    for fmt in ("csv", "json"):
        path = tmp_path_factory.mktemp("rt") / f"d.{fmt}"
        save_runs(ds, path)
        back = load_runs(path)
        assert len(back) == len(ds)
        for a, b in zip(back, ds):
            assert a.model_label == b.model_label
            assert a.losses == b.losses
            np.testing.assert_array_equal(
                [a.total_params, a.seen_samples, a.initial_loss, a.per_sample_gmacs],
                [b.total_params, b.seen_samples, b.initial_loss, b.per_sample_gmacs],
            )
