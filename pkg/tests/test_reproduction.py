"""Long-running checks against the published regime results (pytest -m slow)."""

import os

import numpy as np
import pytest

from closure.response import build_closure
from config import REGIMES_DIR
from experiment.models import RegimeSpec
from experiment.pipeline import (
    calibrate_params,
    estimate_x_star,
    integrate_system,
    run_closure,
    run_regime,
    stage_seeds,
)
from experiment.reference import EIGENVALUE_REGIME, PUBLISHED_EIGENVALUES, published_pair, sign_agrees
from experiment.regimes import load_regime, reference_regime_dicts, reference_regimes
from experiment.suite import agreement_count, run_suite
from integrator.rk4 import integrate_sampled
from model.lorenz import FastLimitingSystem
from storage.results_store import ResultsStore
from utils.constants import DIAG_ACF, DIAG_CCF, DIAG_PDF

pytestmark = pytest.mark.slow


def _reference_dict(lam, f_y, f_x, **overrides):
    data = next(d for d in reference_regime_dicts()
                if (d['params']['lambda_x'], d['params']['f_y'], d['params']['f_x']) == (lam, f_y, f_x))
    return dict(data, **overrides)


def test_reference_closure_eigenvalues(tmp_path):
    spec = load_regime(REGIMES_DIR / "lam0.4_fx6_fy8.json")
    p = spec.params
    assert (p.lambda_x, p.f_y, p.f_x) == EIGENVALUE_REGIME
    closure = run_closure(spec, ResultsStore(tmp_path))
    r_min, lrl_min = closure.lowest_symmetric_eigenvalues()
    assert r_min == pytest.approx(PUBLISHED_EIGENVALUES['min_sym_r_star'], rel=0.25)
    assert lrl_min == pytest.approx(PUBLISHED_EIGENVALUES['min_sym_lrl'], rel=0.25)


def test_reduced_model_wins_on_correlations_at_weak_coupling(tmp_path):
    result = run_regime(RegimeSpec.from_dict(_reference_dict(0.3, 8.0, 6.0)), tmp_path)
    p = result.params
    for diagnostic in (DIAG_ACF, DIAG_CCF):
        errors = result.errors[diagnostic]
        assert sign_agrees(diagnostic, p.lambda_x, p.f_y, p.f_x, errors['reduced'], errors['zero_order'])


def test_halving_the_full_model_step(tmp_path):
    coarse = RegimeSpec.from_dict(_reference_dict(0.3, 8.0, 6.0, t_stats=2000.0, x_star_mode='zero'))
    fine = RegimeSpec.from_dict(_reference_dict(0.3, 8.0, 6.0, t_stats=2000.0, x_star_mode='zero',
                                                plans={'full': {'dt': 5e-5, 'sample_every': 1000}}))
    params = calibrate_params(coarse, ResultsStore(tmp_path))
    seed = stage_seeds(coarse.seed)['full']
    a = integrate_system('full', coarse, params, None, seed).values
    b = integrate_system('full', fine, params, None, seed).values
    # independent chaotic paths after divergence, so the bound is statistical: the rescaled
    # mean sits near zero and takes an absolute bound, and 5% on the variance covers the
    # sampling error of two 2000-unit runs
    assert abs(a.mean() - b.mean()) < 0.05
    assert b.var() == pytest.approx(a.var(), rel=0.05)


def test_halving_the_lag_stride(tmp_path):
    spec = RegimeSpec.from_dict(_reference_dict(0.3, 8.0, 6.0, x_star_mode='zero', t_av=2000.0))
    params = calibrate_params(spec, ResultsStore(tmp_path))
    x_star = np.zeros(params.n_x)
    plan = spec.plan_for('fast', stage_seeds(spec.seed)['fast'])
    series = integrate_sampled(FastLimitingSystem(params, x_star),
                               np.random.default_rng(0).uniform(-0.5, 0.5, params.n_y), plan)
    r1 = build_closure(series, x_star, params, spec.t_corr, lag_stride=1).r_star
    r2 = build_closure(series, x_star, params, spec.t_corr, lag_stride=2).r_star
    assert np.linalg.norm(r1 - r2) / np.linalg.norm(r1) < 0.01


def test_full_model_is_translation_invariant(tmp_path):
    result = run_regime(RegimeSpec.from_dict(_reference_dict(0.3, 8.0, 16.0, x_star_mode='zero')), tmp_path)
    assert result.index_gap < 0.05


@pytest.fixture(scope="module")
def reference_suite(tmp_path_factory):
    jobs = min(8, os.cpu_count() or 1)
    return run_suite(reference_regimes(), jobs=jobs, out_dir=tmp_path_factory.mktemp("reference"), progress=False)


def test_reference_suite_agrees_with_published_signs(reference_suite):
    outcome, table = reference_suite
    assert outcome.failures == {}
    agree, total = agreement_count(table)
    assert total == 32
    assert agree >= 26


def test_weak_coupling_pdf_errors_match_published_scale(reference_suite):
    _, table = reference_suite
    block = table.xs(DIAG_PDF, level='diagnostic')
    weak = block[block.index.get_level_values('lambda') == 0.3]
    assert len(weak) == 4
    for (lam, f_y, f_x), row in weak.iterrows():
        published = published_pair(DIAG_PDF, lam, f_y, f_x)[0]
        assert published / 3.0 <= row['Red.'] <= 3.0 * published


def test_reference_suite_keeps_pdf_mass_on_the_grid(reference_suite):
    outcome, _ = reference_suite
    assert all(summary['pdf_range_ok'] for summary in outcome.summaries.values())


def test_full_model_mean_at_weak_coupling(tmp_path):
    spec = RegimeSpec.from_dict(_reference_dict(0.3, 8.0, 6.0, x_star_mode='full_mean'))
    x_star = estimate_x_star(spec, calibrate_params(spec, ResultsStore(tmp_path)))
    assert x_star.shape == (spec.params.n_x,)
    assert np.all(np.abs(x_star) < 0.2)
