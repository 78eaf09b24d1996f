import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from scalelab.dataset import RunDataset, RunRecord, total_compute
from scalelab.errors import (
    DataValueError,
    InsufficientFrontier,
    InsufficientPoints,
    InvalidParameter,
    InvalidRange,
    RankDeficient,
)
from scalelab.ols import predict_interval
from scalelab.pareto import CostLossPoint, pareto_frontier
from scalelab.powerlaw import (
    _fit_compute,
    curve_to_csv,
    extrapolate,
    fit_compute_law,
    fit_scaling_law,
    predict_curve,
)

from .conftest import SPLITS

seeds = st.integers(0, 2**32 - 1)


def synthetic_runs(seed, exps=(-0.3, -0.5, 0.8), b0=10.0, noise=0.0, n=16):
    gen = np.random.default_rng(seed)
    recs = []
    for i in range(n):
        P = 10 ** gen.uniform(8, 11)
        S = 10 ** gen.uniform(5, 7)
        T = 10 ** gen.uniform(0.3, 1.1)
        y = b0 * P ** exps[0] * S ** exps[1] * T ** exps[2] * 10 ** (noise * gen.normal())
        recs.append(RunRecord(f"r{i}", P, S, T, {"A": y}, per_sample_gmacs=float(gen.uniform(10, 1000))))
    return RunDataset(tuple(recs))


def test_compute_law_noiseless_recovery():
    C = np.logspace(15, 20, 9)
    law = _fit_compute(C, 3 * C**-0.5, range(9))
    assert law.alpha0 == pytest.approx(3.0, rel=1e-8)
    assert law.alpha1 == pytest.approx(-0.5, abs=1e-8)
    assert law.r2 == pytest.approx(1.0, abs=1e-10)
    assert np.all(law.predict(np.logspace(-3, 30, 20)) > 0)


def test_compute_law_needs_frontier():
    with pytest.raises(InsufficientFrontier):
        _fit_compute([1.0, 2.0, 3.0], [1.0, 0.5, 0.7], range(3))


@pytest.mark.parametrize("split", SPLITS)
def test_compute_law_uses_frontier_only(ref, split):
    law = fit_compute_law(ref, split)
    costs = [total_compute(r) for r in ref]
    losses = [r.loss(split) for r in ref]
    front = {id(p.source_run) for p in law.frontier}
    assert [p.source_run for p in law.frontier] == [
        p.source_run for p in pareto_frontier([CostLossPoint(c, y, r) for c, y, r in zip(costs, losses, ref)])
    ]
    for i, r in enumerate(ref):
        if id(r) in front:
            continue
        keep = [j for j in range(len(ref)) if j != i]
        again = _fit_compute([costs[j] for j in keep], [losses[j] for j in keep], [ref[j] for j in keep])
        assert again.alpha0 == law.alpha0
        assert again.alpha1 == law.alpha1


@settings(max_examples=40, deadline=None)
@given(seeds, st.floats(1e-9, 1e9))
def test_compute_law_unit_invariance(seed, factor):
    gen = np.random.default_rng(seed)
    C = np.sort(10 ** gen.uniform(10, 20, size=12))
    y = 5 * C**-0.2 * 10 ** (0.05 * gen.normal(size=12))
    try:
        base = _fit_compute(C, y, range(12))
    except InsufficientFrontier:
        return
    scaled = _fit_compute(C * factor, y, range(12))
    assert scaled.alpha1 == pytest.approx(base.alpha1, abs=1e-10)
    assert [p.source_run for p in scaled.frontier] == [p.source_run for p in base.frontier]


def test_scaling_law_noiseless_recovery():
    law = fit_scaling_law(synthetic_runs(0), "A")
    np.testing.assert_allclose(law.exponents, [-0.3, -0.5, 0.8], atol=1e-8)
    assert law.beta0 == pytest.approx(10.0, rel=1e-7)
    assert law.raw.r2 == pytest.approx(1.0, abs=1e-10)


@settings(max_examples=25, deadline=None)
@given(seeds, st.lists(st.floats(1e-4, 1e4), min_size=3, max_size=3))
def test_scaling_law_unit_invariance(seed, factors):
    runs = synthetic_runs(seed, noise=0.05)
    base = fit_scaling_law(runs, "A")
    fP, fS, fT = factors
    moved = RunDataset(tuple(
        RunRecord(r.model_label, r.total_params * fP, r.seen_samples * fS, r.initial_loss * fT, r.losses,
                  per_sample_gmacs=r.per_sample_gmacs)
        for r in runs
    ))
    law = fit_scaling_law(moved, "A")
    np.testing.assert_allclose(law.exponents, base.exponents, atol=1e-10)
    np.testing.assert_allclose(law.standardized_betas, base.standardized_betas, atol=1e-10)


@pytest.mark.parametrize("split", SPLITS)
def test_raw_and_standardized_agree(laws, split):
    law = laws[split]
    raw, std = law.raw, law.standardized
    assert raw.r2 == pytest.approx(std.r2, abs=1e-10)
    np.testing.assert_allclose(std.frame.response_to_log(std.fitted), raw.fitted, atol=1e-8)
    np.testing.assert_allclose(std.residuals * std.frame.y_scale, raw.residuals, atol=1e-8)


def test_scaling_law_errors(ref):
    with pytest.raises(InsufficientPoints):
        fit_scaling_law(RunDataset(ref.records[:4]), "SC")
    one_size = RunDataset(tuple(r for r in ref if r.total_params == 4e8) * 2)
    with pytest.raises(RankDeficient):
        fit_scaling_law(one_size, "SC")
    with pytest.raises(InvalidParameter):
        fit_scaling_law(ref, "SC", "robust")


def test_pooled_standardization_runs(ref):
    law = fit_scaling_law(ref, "SC", "pooled")
    assert law.standardized.frame.standardization == "pooled"
    np.testing.assert_allclose(law.exponents, fit_scaling_law(ref, "SC").exponents, atol=1e-12)


@pytest.mark.parametrize("split", SPLITS)
def test_extrapolate_training_point(laws, ref, split):
    law = laws[split]
    r = ref[5]
    pred = extrapolate(law, r.total_params, r.seen_samples, r.initial_loss)
    assert pred.point == pytest.approx(10 ** law.raw.fitted[5], rel=1e-10)
    assert 0 < pred.lower < pred.point < pred.upper
    assert pred.interval == (pred.lower, pred.upper)


def test_extrapolate_rejects_non_positive(laws):
    with pytest.raises(DataValueError):
        extrapolate(laws["UC"], 0, 1e6, 3.0)


def test_extrapolation_warning_flag(laws):
    from scalelab.errors import ExtrapolationWarning

    with pytest.warns(ExtrapolationWarning):
        pred = extrapolate(laws["UC"], 30e9, 10_240_000, 3.0)
    assert pred.extrapolation


@settings(max_examples=40, deadline=None)
@given(st.floats(-1, 1), st.floats(0.5, 0.999))
def test_back_transform_preserves_order(shift, level):
    law = fit_scaling_law(synthetic_runs(3, noise=0.1), "A")
    pred = extrapolate(law, 10 ** (9.5 + shift), 10 ** (6 + shift), 10 ** (0.7 + shift / 3), level)
    assert 0 < pred.lower < pred.point < pred.upper


def test_curve_degenerate_range(laws):
    pts = predict_curve(laws["SC"], "P", 1e9, 1e9, 2, {"S": 1e6, "T": 6.0})
    assert pts[0] == pts[1]


def test_curve_errors(laws):
    with pytest.raises(InvalidRange):
        predict_curve(laws["SC"], "P", 0, 1e9, 5, {"S": 1e6, "T": 6.0})
    with pytest.raises(InvalidRange):
        predict_curve(laws["SC"], "P", 1e8, 1e9, 1, {"S": 1e6, "T": 6.0})
    with pytest.raises(InvalidParameter):
        predict_curve(laws["SC"], "Q", 1e8, 1e9, 5, {"S": 1e6, "T": 6.0})
    with pytest.raises(InvalidParameter):
        predict_curve(laws["SC"], "P", 1e8, 1e9, 5, {"S": 1e6})


@pytest.mark.parametrize("split", SPLITS)
@pytest.mark.parametrize("sweep,fixed", [("P", {"S": 2e6, "T": 6.0}), ("S", {"P": 1e9, "T": 6.0}),
                                         ("T", {"P": 1e9, "S": 2e6})])
def test_curve_monotone_in_exponent_sign(laws, split, sweep, fixed):
    law = laws[split]
    pts = predict_curve(law, sweep, 1e-2 * (1e9 if sweep == "P" else 1e6 if sweep == "S" else 100),
                        1e9 * 10 if sweep == "P" else 1e7 if sweep == "S" else 12, 30, fixed)
    ys = np.array([p.y_pred for p in pts])
    exponent = law.exponents["PST".index(sweep)]
    steps = np.diff(ys)
    assert np.all(steps * np.sign(exponent) > 0)
    xs = np.array([p.x for p in pts])
    np.testing.assert_allclose(np.diff(np.log10(xs)), np.diff(np.log10(xs))[0], rtol=1e-9)


def test_uc_curve_inside_observed_prediction_intervals(laws, ref):
    law = laws["UC"]
    sizes = sorted({r.total_params for r in ref})
    rows = [r for r in ref if r.seen_samples == 10_240_000]
    for r in rows:
        pts = predict_curve(law, "P", r.total_params, r.total_params, 2,
                            {"S": 10_240_000, "T": r.initial_loss})
        pi = extrapolate(law, r.total_params, 10_240_000, r.initial_loss)
        assert pi.lower <= pts[0].y_pred <= pi.upper
        assert pi.lower <= r.loss("UC") <= pi.upper
    assert len(sizes) == 4


def test_curve_csv_columns(laws):
    text = curve_to_csv(predict_curve(laws["ST"], "S", 1e5, 1e8, 4, {"P": 1e9, "T": 6.0}))
    lines = text.splitlines()
    assert lines[0] == "x,y_pred,pi_lower,pi_upper"
    assert len(lines) == 5
    vals = [list(map(float, l.split(","))) for l in lines[1:]]
    assert all(lo <= y <= hi for _, y, lo, hi in vals)


def test_predict_uses_raw_fit(laws):
    law = laws["SC"]
    x = (2e9, 3e6, 7.0)
    pi = predict_interval(law.raw, x)
    assert law.predict(*x) == pytest.approx(10**pi.point, rel=1e-10)
