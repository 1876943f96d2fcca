"""Command line entry point.

Verbs:
  validate  check a manifest and every data file it references
  features  extract the feature tables from a manifest
  cluster   cluster an existing features.csv
  run       the full pipeline: features + clustering
  serve     start the HTTP service

Exit codes: 0 success, 1 one or more (type, resolution) slices failed,
2 invalid input or configuration.
"""

from __future__ import annotations

import argparse
import sys

from .config import RunConfig, apply_overrides, config_from_items, read_config
from .errors import HydroscalesError, InvalidConfig
from .ingest import ingest, read_manifest
from .pipeline import read_features_csv, run_clustering, run_features, run_pipeline


def _add_config_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="flat key = value config file")
    parser.add_argument("--n-trees", type=int, dest="n_trees")
    parser.add_argument("--mtry", type=int)
    parser.add_argument("--k-fixed", type=int, dest="k_fixed")
    parser.add_argument("--k-sweep", dest="k_sweep", help="comma-separated cluster counts")
    parser.add_argument("--seed", type=int)
    parser.add_argument("--workers", type=int)
    parser.add_argument("--resolutions", help="comma-separated resolution names")
    parser.add_argument(
        "--statistic",
        action="append",
        default=None,
        metavar="TYPE=STAT",
        help="aggregation statistic per series type, e.g. temperature=mean",
    )
    parser.add_argument("--proximity-oob", action="store_true", default=None, dest="proximity_oob")


def _build_config(args: argparse.Namespace) -> RunConfig:
    config = read_config(args.config) if args.config else RunConfig()
    overrides = dict(
        n_trees=args.n_trees,
        mtry=args.mtry,
        k_fixed=args.k_fixed,
        seed=args.seed,
        workers=args.workers,
        proximity_oob=args.proximity_oob,
    )
    if args.k_sweep is not None:
        overrides["k_sweep"] = tuple(int(k) for k in args.k_sweep.split(","))
    if args.resolutions is not None:
        overrides["resolutions"] = tuple(r.strip() for r in args.resolutions.split(","))
    if args.statistic:
        statistics = dict(config.statistics)
        for item in args.statistic:
            if "=" not in item:
                raise InvalidConfig(f"--statistic expects TYPE=STAT, got {item!r}")
            key, value = item.split("=", 1)
            statistics[key.strip()] = value.strip()
        overrides["statistics"] = statistics
    return apply_overrides(config, **overrides)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hydroscales", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="verb", required=True)

    p_validate = sub.add_parser("validate", help="check a manifest and its data files")
    p_validate.add_argument("manifest")

    p_features = sub.add_parser("features", help="extract feature tables")
    p_features.add_argument("manifest")
    p_features.add_argument("-o", "--out-dir", required=True)
    _add_config_arguments(p_features)

    p_cluster = sub.add_parser("cluster", help="cluster an existing features.csv")
    p_cluster.add_argument("features_csv")
    p_cluster.add_argument("-o", "--out-dir", required=True)
    _add_config_arguments(p_cluster)

    p_run = sub.add_parser("run", help="full pipeline")
    p_run.add_argument("manifest")
    p_run.add_argument("-o", "--out-dir", required=True)
    _add_config_arguments(p_run)

    p_serve = sub.add_parser("serve", help="start the HTTP service")
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=8000)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.verb == "validate":
            manifest = read_manifest(args.manifest)
            series = ingest(manifest)
            print(f"ok: {len(manifest.entries)} entries, {len(series)} series parsed")
            return 0
        if args.verb == "serve":
            import uvicorn

            from .service import app

            uvicorn.run(app, host=args.host, port=args.port)
            return 0

        config = _build_config(args)
        if args.verb == "features":
            report = run_features(read_manifest(args.manifest), config, args.out_dir)
        elif args.verb == "cluster":
            report = run_clustering(read_features_csv(args.features_csv), config, args.out_dir)
        else:  # run
            report = run_pipeline(read_manifest(args.manifest), config, args.out_dir)
    except HydroscalesError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    for (series_type, resolution), message in sorted(report.failures.items()):
        print(f"slice failed: {series_type}/{resolution}: {message}", file=sys.stderr)
    print(
        f"wrote {', '.join(report.written)} to {report.out_dir} "
        f"({len(report.feature_matrix.rows)} feature rows)"
    )
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())
