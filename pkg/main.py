#!/usr/bin/env python3
"""L96 CLOSURE - Command-line entry point

Subcommands:
- calibrate: rescaling constants of the uncoupled model at one forcing
- closure:   closure (x*, zbar*, Sigma*, R*, b*, C*) for one regime
- run:       full vs reduced vs zero-order comparison for one regime
- suite:     several regimes, optionally in parallel, plus error tables
- tables:    error tables rebuilt from persisted summaries
"""

import argparse
import os
import sys
from pathlib import Path

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

from config import (
    APP_NAME,
    APP_VERSION,
    CALIBRATION_DT,
    CALIBRATION_N,
    CALIBRATION_SPIN_UP,
    CALIBRATION_T_TOTAL,
    DEFAULT_JOBS,
    RESULTS_DIR,
)
from utils.logger import Logger, setup_logger


class ClosureApp:
    """Command controller"""

    def __init__(self):
        self.logger = Logger(__name__)
        self.logger.info(f"{APP_NAME} v{APP_VERSION}")

    def calibrate(self, args) -> int:
        from model.calibration import CalibrationProtocol, calibrate_with, rescaled_statistics
        from storage.results_store import save_json

        protocol = CalibrationProtocol(n=args.n, t_total=args.t_total, dt=args.dt,
                                       spin_up=args.spin_up, seed=args.seed)
        rescale = calibrate_with(args.forcing, protocol)
        payload = {'forcing': args.forcing, 'protocol': protocol.to_dict(), 'rescale': rescale.to_dict()}
        if args.check:
            check = rescaled_statistics(args.forcing, rescale, n=args.n, t_total=args.t_total,
                                        dt=args.dt, spin_up=args.spin_up, seed=args.seed + 1)
            payload['rescaled_check'] = {'mean': check.mean, 'std': check.beta}
            self.logger.info(f"Rescaled model: mean {check.mean:.4f}, std {check.beta:.4f}")
        save_json(Path(args.out), payload)
        print(f"F = {args.forcing:g}: mean = {rescale.mean:.6f}, beta = {rescale.beta:.6f}")
        return 0

    def closure(self, args) -> int:
        from experiment.pipeline import run_closure
        from experiment.regimes import load_regime
        from storage.results_store import ResultsStore, save_closure

        spec = load_regime(Path(args.regime))
        store = ResultsStore(Path(args.cache)) if args.cache else None
        closure = run_closure(spec, store, workers=args.workers)
        save_closure(closure, Path(args.out))
        r_min, lrl_min = closure.lowest_symmetric_eigenvalues()
        print(f"{spec.regime_id}: lowest symmetric eigenvalues R* {r_min:.4e}, L R* L^T {lrl_min:.4e}")
        return 0

    def run(self, args) -> int:
        from experiment.pipeline import run_regime
        from experiment.regimes import load_regime
        from utils.constants import DIAGNOSTICS, SYSTEM_REDUCED, SYSTEM_ZERO_ORDER

        spec = load_regime(Path(args.regime))
        result = run_regime(spec, Path(args.out), workers=args.workers)
        for diagnostic in DIAGNOSTICS:
            errors = result.errors[diagnostic]
            print(f"{diagnostic}: Red. {errors[SYSTEM_REDUCED]:.4e}  Z.O. {errors[SYSTEM_ZERO_ORDER]:.4e}")
        return 0

    def suite(self, args) -> int:
        from experiment.regimes import load_suite
        from experiment.suite import format_tables, run_suite

        specs = load_suite(Path(args.config), profile=args.profile)
        outcome, table = run_suite(specs, args.jobs, Path(args.out), workers=args.workers,
                                   progress=not args.quiet)
        print(format_tables(table), end='')
        for regime_id, error in sorted(outcome.failures.items()):
            print(f"FAILED {regime_id}: {error}")
        return 0

    def tables(self, args) -> int:
        from experiment.suite import format_tables, tables_from_dir, write_tables
        from utils.export import ExportManager

        table = tables_from_dir(Path(args.in_dir))
        write_tables(table, Path(args.in_dir))
        print(format_tables(table), end='')
        if args.excel or args.pdf:
            exporter = ExportManager()
            if args.excel:
                exporter.export_tables_to_excel(table, args.excel)
            if args.pdf:
                exporter.export_tables_to_pdf(table, args.pdf)
        return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog='l96-closure', description=f"{APP_NAME} v{APP_VERSION}")
    sub = parser.add_subparsers(dest='command', required=True)

    p = sub.add_parser('calibrate', help='rescaling constants of the uncoupled model')
    p.add_argument('--forcing', type=float, required=True)
    p.add_argument('--out', required=True)
    p.add_argument('--n', type=int, default=CALIBRATION_N)
    p.add_argument('--t-total', type=float, default=CALIBRATION_T_TOTAL)
    p.add_argument('--dt', type=float, default=CALIBRATION_DT)
    p.add_argument('--spin-up', type=float, default=CALIBRATION_SPIN_UP)
    p.add_argument('--seed', type=int, default=0)
    p.add_argument('--check', action='store_true', help='also report statistics of the rescaled model')

    p = sub.add_parser('closure', help='build the closure of one regime')
    p.add_argument('--regime', required=True)
    p.add_argument('--out', required=True)
    p.add_argument('--cache', default=None, help='results directory holding calibration caches')
    p.add_argument('--workers', type=int, default=1)

    p = sub.add_parser('run', help='compare full, reduced and zero-order models for one regime')
    p.add_argument('--regime', required=True)
    p.add_argument('--out', default=str(RESULTS_DIR))
    p.add_argument('--workers', type=int, default=1)

    p = sub.add_parser('suite', help='run several regimes')
    p.add_argument('--config', required=True)
    p.add_argument('--jobs', type=int, default=DEFAULT_JOBS)
    p.add_argument('--out', default=str(RESULTS_DIR))
    p.add_argument('--profile', choices=('desk', 'full'), default=None)
    p.add_argument('--workers', type=int, default=1)
    p.add_argument('--quiet', action='store_true')

    p = sub.add_parser('tables', help='rebuild the error tables from persisted results')
    p.add_argument('--in', dest='in_dir', default=str(RESULTS_DIR))
    p.add_argument('--excel', default=None)
    p.add_argument('--pdf', default=None)

    return parser


def main(argv=None):
    """Application entry point"""
    args = build_parser().parse_args(argv)
    try:
        setup_logger()
        app = ClosureApp()
        sys.exit(getattr(app, args.command)(args))
    except Exception as e:
        print(f"Fatal error: {e}")
        import traceback
        traceback.print_exc()
        sys.exit(1)


if __name__ == "__main__":
    main()
