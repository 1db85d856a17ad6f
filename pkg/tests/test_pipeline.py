import math

import numpy as np
import pytest
from sklearn.base import clone

from patchclust import (
    Dataset,
    FeatureSelectionConfig,
    IntersticeDetector,
    SliceRelevanceSelector,
    SliceSpec,
    ValidationError,
    detect_interstices,
    grid_anchors,
    relevance,
    select_features,
    single_linkage_1d,
    slice_population_histogram,
    take_slice,
)
from patchclust.pipeline import (
    DEFAULT_GRID,
    merge_intervals,
    interval_iou,
    prepare_dataset,
    run_feature_selection,
)
from patchclust.synth import TwoClusterModel, gen_blob_2d, gen_elongated_2d, gen_shapes, gen_two_cluster_model

SMALL = FeatureSelectionConfig(grid_values=(-1.0, 0.0, 1.0), min_slice_points=30)


@pytest.fixture(scope="module")
def shapes():
    return gen_shapes(600, seed=1)


def test_config_defaults():
    cfg = FeatureSelectionConfig()
    assert cfg.grid_values == DEFAULT_GRID == (-2, -2, 0, 1, 2)
    assert (cfg.radius, cfg.alpha, cfg.min_slice_points, cfg.noise_amplitude) == (2, 4, 150, 0.2)


def test_config_from_camel_case():
    cfg = FeatureSelectionConfig.from_mapping(
        {"gridValues": [0, 1], "r": 1.5, "minSlicePoints": 10, "noiseAmplitude": 0, "alpha": 3})
    assert cfg.grid_values == (0.0, 1.0)
    assert (cfg.radius, cfg.min_slice_points, cfg.noise_amplitude, cfg.alpha) == (1.5, 10, 0, 3)
    assert FeatureSelectionConfig.from_mapping(cfg.to_dict()) == cfg


@pytest.mark.parametrize("kw", [
    {"radius": 0}, {"alpha": -1}, {"min_slice_points": -1},
    {"noise_amplitude": -0.1}, {"grid_values": ()}, {"occurrence": "never"},
])
def test_config_rejects(kw):
    with pytest.raises(ValidationError):
        FeatureSelectionConfig(**kw)


def test_feature_rows_match_slice_by_slice_recount(shapes):
    result = run_feature_selection(shapes, SMALL)
    prepared = prepare_dataset(shapes, SMALL)
    by_name = {r.name: r for r in result.rows}
    for i, name in enumerate(shapes.names):
        rhos, kept = [], 0
        for anchor in grid_anchors(5, SMALL.grid_values, i):
            s = take_slice(prepared, SliceSpec(i, anchor, SMALL.radius))
            if len(s) <= SMALL.min_slice_points:
                continue
            kept += 1
            rep = relevance(single_linkage_1d(s.coords, s.rows), SMALL.alpha)
            if rep.occurred:
                rhos.append(rep.rho)
        row = by_name[name]
        assert row.n_slices == kept
        assert row.occurrences == len(rhos)
        assert row.mean_relevance == pytest.approx(np.mean(rhos) if rhos else 0.0, abs=1e-12)


def test_feature_rows_sorted_and_consistent(shapes):
    rows = select_features(shapes, SMALL)
    assert [r.product for r in rows] == sorted((r.product for r in rows), reverse=True)
    for r in rows:
        assert r.product == pytest.approx(r.occurrences * r.mean_relevance)
        assert 0 <= r.mean_relevance <= 1
        assert r.occurrences <= r.n_slices
        if r.occurrences == 0:
            assert r.mean_relevance == 0


def test_feature_selection_deterministic(shapes):
    assert select_features(shapes, SMALL) == select_features(shapes, SMALL)


def test_feature_selection_needs_two_columns():
    with pytest.raises(ValidationError):
        select_features(Dataset(np.arange(10.0).reshape(-1, 1), ("x",)))


def test_histogram_undefined_when_nothing_retained(shapes):
    cfg = FeatureSelectionConfig(min_slice_points=math.inf)
    h = slice_population_histogram(shapes, cfg)
    assert not h.defined and math.isnan(h.mean)
    assert h.to_dict()["mean"] is None


def test_histogram_huge_radius_counts_everything(shapes):
    cfg = FeatureSelectionConfig(radius=1e6, grid_values=(0.0,), min_slice_points=0)
    h = slice_population_histogram(shapes, cfg, bins=5)
    assert h.n_slices == 5 and h.mean == 600
    assert h.counts.sum() == 5


def test_histogram_matches_result_populations(shapes):
    h = slice_population_histogram(shapes, SMALL)
    pops = run_feature_selection(shapes, SMALL).populations
    assert h.n_slices == pops.size
    assert h.mean == pytest.approx(pops.mean())


def test_merge_and_iou():
    assert merge_intervals([(0.5, 0.6), (0, 0.1), (0.05, 0.2)]) == [(0, 0.2), (0.5, 0.6)]
    assert interval_iou([(0.4, 0.6)], (0.4, 0.6)) == 1.0
    assert interval_iou([(0.3, 0.5)], (0.4, 0.6)) == pytest.approx(1 / 3)
    assert interval_iou([], (0.4, 0.6)) == 0.0


def test_detect_single_cluster_is_empty():
    blob = gen_blob_2d(1000, seed=0)
    anchors = [(v,) for v in np.linspace(0.3, 0.7, 21)]
    assert detect_interstices(blob, 0, anchors, 0.1) == []


def test_detect_one_dimensional_model():
    m = TwoClusterModel(x1=0.4, x2=0.6, lambda1=1400, lambda2=0, lambda3=1200)
    x = gen_two_cluster_model(m, seed=2)
    ds = Dataset(x.reshape(-1, 1), ("x",))
    (patch,) = detect_interstices(ds, 0, [()], 1.0)
    assert patch.xa < 0.4 + 0.01 and patch.xa > 0.39
    assert patch.xb > 0.6 - 1e-12 and patch.xb < 0.61
    assert patch.rho > 0.9


def test_detect_respects_population_floor():
    ds, _ = gen_elongated_2d(1000, seed=0)
    assert detect_interstices(ds, 0, [(0.5,)], 0.1, min_slice_points=10_000) == []


def test_selector_estimator(shapes):
    sel = SliceRelevanceSelector(grid_values=(-1.0, 0.0, 1.0), min_slice_points=30)
    assert clone(sel).get_params() == sel.get_params()
    Xt = sel.fit_transform(shapes.values)
    assert Xt.shape == (600, 2)
    kept = set(np.asarray(shapes.names)[sel.get_support()])
    assert kept == {"circularity", "rel_perimeter"}
    assert sel.scores_.shape == (5,)
    assert sel.occurrences_.shape == sel.mean_relevance_.shape == (5,)
    assert sel.scores_[0] < sel.scores_[sel.get_support()].min()


def test_detector_estimator():
    ds, truth = gen_elongated_2d(1000, seed=0)
    det = IntersticeDetector(anchor_values=np.linspace(0.2, 0.8, 13)).fit(ds.values)
    assert det.intervals_
    assert interval_iou(det.intervals_, tuple(truth["gap"])) > 0.4
    probe = np.array([[0.5, 0.5], [0.1, 0.5], [0.9, 0.5]])
    assert det.predict(probe).tolist() == [1, 0, 0]
    assert clone(det).get_params()["radius"] == 0.1


def test_detector_bad_axis():
    with pytest.raises(ValueError):
        IntersticeDetector(free_index=3).fit(np.zeros((5, 2)))
