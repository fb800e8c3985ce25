"""
Command line entry point.

    mffactor simulate    --config run.cfg --out data/
    mffactor reconstruct --config run.cfg --data data/ --out results/
    mffactor validate    [--config run.cfg] [--out report/] [--mismatch]
    mffactor extents     --config run.cfg

Exit codes: 0 ok, 2 configuration error, 3 numeric failure, 4 missing or
mismatched data, 5 oracle failure.
"""

from __future__ import annotations

import argparse
import sys
import warnings

import numpy as np

from . import __version__, pipeline
from .config import load_config
from .errors import (IncompleteRecord, InvalidArgument, InvalidConfig, InvalidGeometry,
                     NumericFailure, PositivityError, ResolutionTooCoarse)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3
EXIT_DATA = 4
EXIT_ORACLE = 5


def _parser():
    p = argparse.ArgumentParser(prog="mffactor", description=__doc__.split("\n\n")[0].strip())
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, config_required=True):
        sp.add_argument("--config", required=config_required, help="run configuration file")
        sp.add_argument("--seed", type=int, default=None, help="override the noise seed")
        sp.add_argument("--quiet", action="store_true", help="suppress warnings and progress")

    sp = sub.add_parser("simulate", help="synthesise multi-frequency data")
    common(sp)
    sp.add_argument("--out", required=True, help="output directory for record CSVs")

    sp = sub.add_parser("reconstruct", help="evaluate the indicator and contrast metrics")
    common(sp)
    sp.add_argument("--data", required=True, help="directory holding the record CSVs")
    sp.add_argument("--out", required=True, help="output directory")

    sp = sub.add_parser("validate", help="run the discrete oracles")
    common(sp, config_required=False)
    sp.add_argument("--out", default=None, help="write the report here")
    sp.add_argument("--mismatch", action="store_true",
                    help="negative control: factor with a different spatial rule than the data")

    sp = sub.add_parser("extents", help="print ground-truth strips, hull area or annulus radii")
    common(sp)
    return p


def _run(args) -> int:
    cfg = load_config(args.config) if args.config else None
    if cfg is not None and args.seed is not None:
        if args.seed < 0:
            raise InvalidConfig("--seed must be nonnegative")
        cfg.seed = args.seed

    if args.command == "simulate":
        res = pipeline.simulate(cfg, args.out)
        pipeline.write_manifest(cfg, args.out, res)
        if not args.quiet:
            for f in res.files:
                print(f"wrote {f}", file=sys.stderr)
        return EXIT_OK

    if args.command == "reconstruct":
        res = pipeline.reconstruct(cfg, args.data, args.out)
        pipeline.write_manifest(cfg, args.out, res)
        sys.stdout.write(pipeline.format_metrics(res.metrics))
        return EXIT_OK

    if args.command == "validate":
        res = pipeline.validate(cfg, args.out, args.mismatch)
        if args.out is not None:
            pipeline.write_manifest(cfg, args.out, res)
        if not args.quiet or not res.report.passed:
            sys.stdout.write(res.text)
        for c in res.report.failures():
            print(f"oracle failed: {c.name} = {c.value:.3e} exceeds {c.bound:.1e}", file=sys.stderr)
        return EXIT_OK if res.report.passed else EXIT_ORACLE

    res = pipeline.extents(cfg)
    sys.stdout.write(res.text)
    return EXIT_OK


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    with warnings.catch_warnings():
        if args.quiet:
            warnings.simplefilter("ignore")
        try:
            return _run(args)
        except (InvalidConfig, PositivityError, InvalidGeometry, ResolutionTooCoarse) as exc:
            print(f"config error: {exc}", file=sys.stderr)
            return EXIT_CONFIG
        except (IncompleteRecord, pipeline.MissingData) as exc:
            print(f"data error: {exc}", file=sys.stderr)
            return EXIT_DATA
        except InvalidArgument as exc:
            # malformed record files surface as argument errors from the reader
            print(f"data error: {exc}", file=sys.stderr)
            return EXIT_DATA
        except (NumericFailure, ArithmeticError, np.linalg.LinAlgError) as exc:
            print(f"numeric failure: {exc}", file=sys.stderr)
            return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
