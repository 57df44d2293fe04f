import json
from dataclasses import replace

import numpy as np
import pytest

import experiment.pipeline as pipeline
from experiment.models import RegimeSpec
from experiment.pipeline import (
    compare,
    estimate_x_star,
    integrate_system,
    persist_result,
    run_closure,
    run_regime,
    stage_seeds,
)
from experiment.suite import run_suite
from integrator.models import SampleSeries
from stats.diagnostics import l2_distance
from storage.results_store import ResultsStore, load_trajectory_csv, load_trajectory_npz
from tests.helpers import quick_regime_dict
from utils.constants import DIAGNOSTICS, REDUCED_VARIANTS, SYSTEMS
from utils.errors import BlowUpError, ConfigError, DimensionError, StageError


@pytest.fixture(scope="module")
def out_dir(tmp_path_factory):
    return tmp_path_factory.mktemp("results")


@pytest.fixture(scope="module")
def quick_spec():
    return RegimeSpec.from_dict(quick_regime_dict())


@pytest.fixture(scope="module")
def quick_result(quick_spec, out_dir):
    return run_regime(quick_spec, out_dir)


def test_stage_seeds_are_deterministic_and_distinct():
    seeds = stage_seeds(5)
    assert seeds == stage_seeds(5)
    assert len(set(seeds.values())) == len(seeds)
    assert seeds != stage_seeds(6)


def test_regime_produces_every_error(quick_result):
    assert set(quick_result.errors) == set(DIAGNOSTICS)
    for diagnostic in DIAGNOSTICS:
        for variant in REDUCED_VARIANTS:
            value = quick_result.errors[diagnostic][variant]
            assert np.isfinite(value) and value >= 0.0


def test_regime_files(quick_result, out_dir):
    regime = out_dir / quick_result.regime_id
    for name in ("closure.json", "summary.json", "timings.json", "response_columns.csv"):
        assert (regime / name).exists()
    for system in SYSTEMS:
        for diagnostic in DIAGNOSTICS:
            assert (regime / "curves" / f"{system}_{diagnostic}.csv").exists()
    assert (regime / "curves" / "fast_pdf.csv").exists()
    assert (out_dir / "calibration" / "F_6.json").exists()
    assert (out_dir / "calibration" / "F_8.json").exists()


def test_errors_can_be_recomputed_from_curve_files(quick_result, out_dir):
    store = ResultsStore(out_dir)
    rid = quick_result.regime_id
    for diagnostic in DIAGNOSTICS:
        full = store.load_curve(rid, "full", diagnostic)
        for variant in REDUCED_VARIANTS:
            value = l2_distance(store.load_curve(rid, variant, diagnostic), full)
            assert value == quick_result.errors[diagnostic][variant]


def test_summary_excludes_timings(quick_result, out_dir):
    summary = ResultsStore(out_dir).load_summary(quick_result.regime_id)
    assert 'timings' not in summary
    assert summary == json.loads(json.dumps(quick_result.to_summary_dict()))
    assert summary['closure_pairs'] == quick_result.closure.provenance['n_pairs']
    assert summary['pdf_range_ok'] == all(f <= 1e-3 for f in summary['out_of_range_fraction'].values())
    timings = json.loads((out_dir / quick_result.regime_id / "timings.json").read_text(encoding='utf-8'))
    assert "integrate/full" in timings


def test_closure_provenance(quick_result):
    closure = quick_result.closure
    assert closure.c_star.shape == (8, 8)
    assert closure.provenance['regime_id'] == quick_result.regime_id
    assert closure.provenance['t_av'] == 40.0
    np.testing.assert_array_equal(closure.x_star, np.zeros(8))


def test_compare_of_identical_systems_is_zero(quick_result):
    full = quick_result.diagnostics['full']
    errors = compare({'full': full, 'reduced': full, 'zero_order': full})
    assert all(v == 0.0 for by_variant in errors.values() for v in by_variant.values())


def test_zero_order_is_reduced_without_correction(quick_result, quick_spec):
    params, closure = quick_result.params, quick_result.closure
    zeroed = closure.with_correction(np.zeros_like(closure.c_star))
    a = integrate_system("zero_order", quick_spec, params, closure, seed=3)
    b = integrate_system("reduced", quick_spec, params, zeroed, seed=3)
    np.testing.assert_array_equal(a.values, b.values)


def test_x_star_zero_and_file(quick_spec, tmp_path):
    np.testing.assert_array_equal(estimate_x_star(quick_spec), np.zeros(8))

    (tmp_path / "x.json").write_text(json.dumps({'x_star': list(range(8))}), encoding='utf-8')
    (tmp_path / "x.csv").write_text(",".join(str(0.5 * k) for k in range(8)), encoding='utf-8')
    (tmp_path / "short.json").write_text(json.dumps([1.0, 2.0]), encoding='utf-8')

    from_json = RegimeSpec.from_dict(quick_regime_dict(x_star_mode='file', x_star_file=str(tmp_path / "x.json")))
    np.testing.assert_array_equal(estimate_x_star(from_json), np.arange(8.0))
    from_csv = RegimeSpec.from_dict(quick_regime_dict(x_star_mode='file', x_star_file=str(tmp_path / "x.csv")))
    np.testing.assert_array_equal(estimate_x_star(from_csv), 0.5 * np.arange(8.0))
    short = RegimeSpec.from_dict(quick_regime_dict(x_star_mode='file', x_star_file=str(tmp_path / "short.json")))
    with pytest.raises(DimensionError):
        estimate_x_star(short)


def test_x_star_from_full_model(quick_result):
    spec = RegimeSpec.from_dict(quick_regime_dict(x_star_mode='full_mean', x_star_duration=1.0))
    pooled = estimate_x_star(spec, quick_result.params, seed=1)
    assert np.all(np.isfinite(pooled))
    assert np.all(pooled == pooled[0])
    per_index = estimate_x_star(RegimeSpec.from_dict(quick_regime_dict(
        x_star_mode='full_mean', x_star_duration=1.0, pool_indices=False)), quick_result.params, seed=1)
    np.testing.assert_allclose(per_index.mean(), pooled[0], rtol=1e-12)
    assert np.ptp(per_index) > 0.0


def test_failing_stage_is_named(out_dir):
    spec = RegimeSpec.from_dict(quick_regime_dict(name="missing_x_star", x_star_mode='file',
                                                  x_star_file=str(out_dir / "nowhere.csv")))
    with pytest.raises(StageError) as info:
        run_regime(spec, out_dir)
    assert info.value.stage == "x_star"


def test_blow_up_names_the_system(out_dir, monkeypatch):
    original = pipeline.integrate_system

    def exploding(name, *args, **kwargs):
        if name == "full":
            raise BlowUpError(time=1.5, system=name)
        return original(name, *args, **kwargs)

    monkeypatch.setattr(pipeline, "integrate_system", exploding)
    spec = RegimeSpec.from_dict(quick_regime_dict(name="exploding"))
    with pytest.raises(StageError) as info:
        run_regime(spec, out_dir)
    assert (info.value.stage, info.value.system) == ("integrate", "full")
    assert isinstance(info.value.cause, BlowUpError)


def test_run_closure_matches_regime_closure(quick_spec, quick_result, out_dir):
    closure = run_closure(quick_spec, ResultsStore(out_dir))
    np.testing.assert_array_equal(closure.r_star, quick_result.closure.r_star)


@pytest.mark.parametrize("fmt,loader", [("npz", load_trajectory_npz), ("csv", load_trajectory_csv)])
def test_trajectories_follow_the_configured_format(quick_spec, quick_result, tmp_path, fmt, loader):
    result = replace(quick_result, spec=replace(quick_spec, save_trajectories=True, trajectory_format=fmt))
    series = SampleSeries(0.05, 100.0, np.arange(12.0).reshape(3, 4))
    persist_result(result, ResultsStore(tmp_path), {'full': series})
    back = loader(tmp_path / quick_result.regime_id / f"full_slow.{fmt}")
    np.testing.assert_array_equal(back.values, series.values)
    assert back.dt_sample == pytest.approx(0.05)


def test_unknown_trajectory_format():
    with pytest.raises(ConfigError):
        RegimeSpec.from_dict(quick_regime_dict(trajectory_format='parquet'))


def test_empty_suite(tmp_path):
    outcome, table = run_suite([], jobs=1, out_dir=tmp_path, progress=False)
    assert outcome.summaries == {} and outcome.failures == {}
    assert table.empty
    assert (tmp_path / "tables.txt").read_text(encoding='utf-8') == "No regime results.\n"


def test_suite_records_failures_and_continues(out_dir, caplog):
    bad = RegimeSpec.from_dict(quick_regime_dict(name="bad", x_star_mode='file',
                                                 x_star_file=str(out_dir / "nowhere.csv")))
    outcome, table = run_suite([bad], jobs=1, out_dir=out_dir, progress=False)
    assert outcome.regime_ids == ["bad"]
    assert "StageError" in outcome.failures["bad"]
    assert any(r.exc_info for r in caplog.records if r.name == "experiment.suite")
    assert table.empty


@pytest.mark.slow
def test_rerun_is_bit_identical(quick_spec, quick_result, tmp_path):
    outcome, table = run_suite([quick_spec], jobs=1, out_dir=tmp_path, progress=False)
    first = json.loads(json.dumps(quick_result.to_summary_dict()))
    assert outcome.summaries[quick_spec.regime_id] == quick_result.to_summary_dict()
    assert ResultsStore(tmp_path).load_summary(quick_spec.regime_id) == first
    assert len(table) == len(DIAGNOSTICS)
