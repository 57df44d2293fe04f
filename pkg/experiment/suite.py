"""Multi-regime suite runner and the consolidated L2 error tables."""

from concurrent.futures import ProcessPoolExecutor, as_completed
from pathlib import Path
from typing import Iterable, List, Optional, Tuple

import pandas as pd
from tqdm import tqdm

from experiment.models import RegimeSpec, SuiteOutcome
from experiment.pipeline import run_regime
from experiment.reference import published_pair, sign_agrees
from storage.results_store import ResultsStore, save_json
from utils.constants import (
    DIAGNOSTIC_TITLES,
    DIAGNOSTICS,
    MSG_REGIME_FAILED,
    REDUCED_VARIANTS,
    SUITE_SUMMARY_FILE,
    SYSTEM_REDUCED,
    SYSTEM_ZERO_ORDER,
    TABLES_CSV_FILE,
    TABLES_TEXT_FILE,
    VARIANT_LABELS,
)
from utils.logger import Logger

logger = Logger(__name__)

TABLE_INDEX = ['diagnostic', 'lambda', 'f_y', 'f_x']


def _run_job(spec_data: dict, out_dir: str, workers: int) -> Tuple[str, Optional[dict], Optional[str]]:
    """Process-pool entry: runs one regime, never raises."""
    spec = RegimeSpec.from_dict(spec_data)
    try:
        result = run_regime(spec, Path(out_dir), workers=workers)
        return spec.regime_id, result.to_summary_dict(), None
    except Exception as e:
        logger.exception(MSG_REGIME_FAILED.format(regime=spec.regime_id, error=e))
        return spec.regime_id, None, f"{type(e).__name__}: {e}"


def run_suite(specs: Iterable[RegimeSpec], jobs: int, out_dir: Path,
              workers: int = 1, progress: bool = True) -> Tuple[SuiteOutcome, pd.DataFrame]:
    """Run independent regimes (in parallel when jobs > 1) and tabulate their errors.

    A failing regime is recorded in the outcome; the others carry on.
    """
    specs: List[RegimeSpec] = list(specs)
    out_dir = Path(out_dir)
    ResultsStore(out_dir)
    outcome = SuiteOutcome()
    payloads = [spec.to_dict() for spec in specs]
    logger.info(f"Suite of {len(specs)} regimes with {jobs} job(s) -> {out_dir}")

    with tqdm(desc='Regimes', total=len(specs), disable=not progress or not specs) as bar:
        if jobs > 1 and len(specs) > 1:
            with ProcessPoolExecutor(max_workers=jobs) as pool:
                futures = [pool.submit(_run_job, data, str(out_dir), workers) for data in payloads]
                for future in as_completed(futures):
                    _record(outcome, *future.result())
                    bar.update(1)
        else:
            for data in payloads:
                _record(outcome, *_run_job(data, str(out_dir), workers))
                bar.update(1)

    table = error_table(outcome.summaries.values())
    write_tables(table, out_dir)
    save_json(out_dir / SUITE_SUMMARY_FILE, outcome.to_dict())
    logger.info(f"Suite finished: {len(outcome.summaries)} succeeded, {len(outcome.failures)} failed")
    return outcome, table


def _record(outcome: SuiteOutcome, regime_id: str, summary: Optional[dict], error: Optional[str]):
    if summary is not None:
        outcome.summaries[regime_id] = summary
    else:
        outcome.failures[regime_id] = error


def error_table(summaries: Iterable[dict]) -> pd.DataFrame:
    """One row per (diagnostic, lambda, F_y, F_x); columns Red., Z.O., published values, sign agreement."""
    rows = []
    for summary in summaries:
        params = summary['spec']['params']
        lam, f_y, f_x = params['lambda_x'], params['f_y'], params['f_x']
        for diagnostic in DIAGNOSTICS:
            errors = summary['errors'][diagnostic]
            reduced, zero_order = errors[SYSTEM_REDUCED], errors[SYSTEM_ZERO_ORDER]
            published = published_pair(diagnostic, lam, f_y, f_x) or (float('nan'), float('nan'))
            rows.append({
                'diagnostic': diagnostic,
                'lambda': lam,
                'f_y': f_y,
                'f_x': f_x,
                VARIANT_LABELS[SYSTEM_REDUCED]: reduced,
                VARIANT_LABELS[SYSTEM_ZERO_ORDER]: zero_order,
                'published Red.': published[0],
                'published Z.O.': published[1],
                'sign agrees': sign_agrees(diagnostic, lam, f_y, f_x, reduced, zero_order),
            })
    columns = TABLE_INDEX + [VARIANT_LABELS[v] for v in REDUCED_VARIANTS] + \
        ['published Red.', 'published Z.O.', 'sign agrees']
    if not rows:
        return pd.DataFrame(columns=columns).set_index(TABLE_INDEX)
    order = {d: i for i, d in enumerate(DIAGNOSTICS)}
    table = pd.DataFrame(rows, columns=columns)
    table = table.sort_values(by=TABLE_INDEX, key=lambda c: c.map(order) if c.name == 'diagnostic' else c)
    return table.set_index(TABLE_INDEX)


def agreement_count(table: pd.DataFrame) -> Tuple[int, int]:
    """(agreeing cells, cells with a published counterpart)."""
    if table.empty:
        return 0, 0
    known = table['sign agrees'].dropna()
    return int(known.astype(bool).sum()), int(known.shape[0])


def format_tables(table: pd.DataFrame) -> str:
    """Text rendering: one table per diagnostic, blocks by lambda and F_y, rows F_x."""
    if table.empty:
        return "No regime results.\n"
    labels = [VARIANT_LABELS[v] for v in REDUCED_VARIANTS]
    lines = []
    for diagnostic in DIAGNOSTICS:
        if diagnostic not in table.index.get_level_values('diagnostic'):
            continue
        lines.append(DIAGNOSTIC_TITLES[diagnostic])
        block = table.xs(diagnostic, level='diagnostic')
        for (lam, f_y), cells in block.groupby(level=['lambda', 'f_y']):
            lines.append(f"  lambda = {lam:g}, F_y = {f_y:g}")
            view = cells.reset_index(level=['lambda', 'f_y'], drop=True)[labels]
            view.index = [f"F_x = {f_x:g}" for f_x in view.index]
            lines.extend("    " + line for line in view.to_string(float_format=lambda v: f"{v:.4g}").splitlines())
        lines.append("")
    agree, total = agreement_count(table)
    if total:
        lines.append(f"Sign of (Red. - Z.O.) agrees with the published tables in {agree} of {total} cells")
    return "\n".join(lines) + "\n"


def write_tables(table: pd.DataFrame, out_dir: Path):
    out_dir = Path(out_dir)
    (out_dir / TABLES_TEXT_FILE).write_text(format_tables(table), encoding='utf-8')
    table.reset_index().to_csv(out_dir / TABLES_CSV_FILE, index=False)


def tables_from_dir(in_dir: Path) -> pd.DataFrame:
    """Rebuild the consolidated table from the summaries persisted under in_dir."""
    store = ResultsStore(Path(in_dir))
    return error_table(summary for _, summary in store.list_summaries())
