"""Command line entry point.

    otlaplace <kind> --config file.json [--jobs J] [--seed S] [--out DIR]

kind is one of synthetic2d, pointcloud, consistency, rates, tlp_demo; the
JSON config holds the remaining ExperimentConfig fields.  On failure a
machine-readable JSON error report is printed to stderr and the process
exits with the class-specific code listed in --help.
"""

import argparse
import json
import sys

from . import errors
from .experiments import ExperimentConfig, run_experiment

_EXIT_CODES = [
    (errors.ConfigError, 2),
    (errors.ParseError, 3),
    (errors.InconsistentPointCount, 4),
    (errors.UnlabeledComponent, 5),
    (errors.SizeLimitExceeded, 6),
    (errors.BudgetExceeded, 7),
    (errors.DomainError, 8),
    (errors.InvalidSpec, 9),
    (errors.OtLaplaceError, 10),
    (OSError, 11),
]

_EPILOG = """exit codes:
  0   success
  2   ConfigError           bad or inconsistent configuration
  3   ParseError            malformed dataset file
  4   InconsistentPointCount  strict-mode point-count violation
  5   UnlabeledComponent    graph component without labels
  6   SizeLimitExceeded     instance above the desk-scale limit
  7   BudgetExceeded        rates proxy above its budget
  8   DomainError           rate function outside its domain
  9   InvalidSpec           invalid domain object
  10  other domain errors
  11  I/O failure
  1   unexpected exception

config keys (JSON object): seed, out_dir, jobs, n_values, m, p,
label_rates, trials, metric (lot|w2), k_neighbors or epsilon_factor
(exactly one for classification kinds), input_path, noise, base_m,
resample_m, fhat_coeff, quadrature_points, n_ref, k_dim, m_values,
proxy_m.  Command line --seed/--out/--jobs override the file.
"""


def _exit_code_for(exc: BaseException) -> int:
    for klass, code in _EXIT_CODES:
        if isinstance(exc, klass):
            return code
    return 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="otlaplace",
        description="Wasserstein-graph Laplace Learning experiments",
        epilog=_EPILOG,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = parser.add_subparsers(dest="kind", required=True)
    for kind in ("synthetic2d", "pointcloud", "consistency", "rates", "tlp_demo"):
        p = sub.add_parser(kind, help="run the %s experiment" % kind)
        p.add_argument("--config", required=False, help="JSON config file")
        p.add_argument("--jobs", type=int, default=None, help="parallel trial workers")
        p.add_argument("--seed", type=int, default=None, help="master seed override")
        p.add_argument("--out", default=None, help="output directory override")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        doc = {}
        if args.config:
            with open(args.config, "r", encoding="utf-8") as fh:
                try:
                    doc = json.load(fh)
                except json.JSONDecodeError as exc:
                    raise errors.ConfigError("config is not valid JSON: %s" % exc) from exc
            if not isinstance(doc, dict):
                raise errors.ConfigError("config must be a JSON object")
        if args.jobs is not None:
            doc["jobs"] = args.jobs
        if args.seed is not None:
            doc["seed"] = args.seed
        if args.out is not None:
            doc["out_dir"] = args.out
        cfg = ExperimentConfig.from_dict(doc, kind=args.kind)
        summary = run_experiment(cfg)
    except Exception as exc:  # every failure maps to a documented exit code
        code = _exit_code_for(exc)
        report = {
            "error": type(exc).__name__,
            "message": str(exc),
            "exit_code": code,
        }
        print(json.dumps(report, sort_keys=True), file=sys.stderr)
        return code
    print(json.dumps({"kind": cfg.kind, "out_dir": cfg.out_dir,
                      "ok": True, "summary_keys": sorted(summary)}, sort_keys=True))
    return 0


if __name__ == "__main__":
    sys.exit(main())
