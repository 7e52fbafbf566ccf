"""Command-line driver for the multi-viewpoint map workbench.

Every subcommand is a thin wrapper over the library: the service and the
CLI share one computation path, so equivalent requests produce identical
numbers.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import ingest as ingest_mod
from .pipeline import (
    PipelineConfig,
    PipelineError,
    load_bundle,
    load_config,
    run_pipeline,
    save_bundle,
)
from .propagation import DEFAULT_FOCUS_THRESHOLD
from .quality import scan_map_sizes, scan_table
from .service import chain_payload, propagate_payload, serve_api
from .som import load_model, project_data, save_model, train_som
from .topology import label_nodes, zone_map


def _write_or_print(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _cmd_ingest(args) -> int:
    if args.site_records:
        records = ingest_mod.load_site_records(args.input)
        if args.domain_code or args.geo_prefix:
            records = ingest_mod.filter_kernel(
                records, args.domain_code or "", args.geo_prefix or ""
            )
        universe = (
            set(json.loads(Path(args.universe).read_text()))
            if args.universe
            else {r.url for r in records}
        )
        records = ingest_mod.restrict_links(records, universe)
        ds = ingest_mod.records_to_viewpoints(records, dedup_links=args.dedup_links)
    else:
        ds = ingest_mod.load_dataset(args.input, format=args.format)
    ingest_mod.save_dataset(ds, args.out)
    print(f"wrote dataset with {len(ds.items)} items, "
          f"{len(ds.viewpoints)} viewpoints to {args.out}")
    return 0


def _cmd_synth(args) -> int:
    features = {}
    coverage = {}
    for spec in args.viewpoint:
        parts = spec.split(":")
        if len(parts) not in (2, 3):
            raise SystemExit(f"bad --viewpoint {spec!r}, expected name:features[:items]")
        features[parts[0]] = int(parts[1])
        if len(parts) == 3:
            coverage[parts[0]] = int(parts[2])
    spec = ingest_mod.SyntheticSpec(
        item_count=args.items,
        features=features,
        group_count=args.groups,
        coupling=args.coupling,
        seed=args.seed,
        item_coverage=coverage,
    )
    ds = ingest_mod.generate_synthetic(spec)
    ingest_mod.save_dataset(ds, args.out)
    print(f"wrote synthetic dataset to {args.out}")
    return 0


def _cmd_scan(args) -> int:
    ds = ingest_mod.load_dataset(args.dataset)
    matrix = ds.viewpoint(args.viewpoint)
    result = scan_map_sizes(
        matrix, args.min_side, args.max_side, seed=args.seed
    )
    _write_or_print(scan_table(result), args.out)
    print(f"chosen size: {result.chosen_size}", file=sys.stderr)
    return 0


def _cmd_train(args) -> int:
    ds = ingest_mod.load_dataset(args.dataset)
    matrix = ds.viewpoint(args.viewpoint)
    som = train_som(matrix, args.side, args.side, seed=args.seed)
    save_model(som, args.out)
    print(f"wrote {args.side}x{args.side} model for {args.viewpoint!r} to {args.out}")
    return 0


def _cmd_zone(args) -> int:
    som = load_model(args.model)
    ds = ingest_mod.load_dataset(args.dataset)
    matrix = ds.viewpoint(som.viewpoint_id)
    proj = project_data(som, matrix)
    labels = label_nodes(som, proj, matrix)
    areas = zone_map(som, labels, proj)
    doc = [
        {
            "area_id": a.area_id,
            "label": a.dominant_label,
            "nodes": [list(som.node_coords(n)) for n in sorted(a.node_indices)],
            "member_items": sorted(a.member_items),
        }
        for a in areas
    ]
    _write_or_print(json.dumps(doc, sort_keys=True, indent=2) + "\n", args.out)
    return 0


def _cmd_consistency(args) -> int:
    bundle = load_bundle(args.bundle)
    _write_or_print(bundle.consistency.to_csv(), args.out)
    return 0


def _cmd_propagate(args) -> int:
    bundle = load_bundle(args.bundle)
    body = {
        "source_map": args.source,
        "target_map": args.target,
        "theta": args.theta,
    }
    if args.area is not None:
        body["area"] = args.area
    else:
        body["nodes"] = [int(n) for n in args.nodes.split(",")]
    payload = propagate_payload(bundle, body)
    _write_or_print(json.dumps(payload, sort_keys=True, indent=2) + "\n", args.out)
    return 0


def _cmd_chain(args) -> int:
    bundle = load_bundle(args.bundle)
    steps = json.loads(Path(args.steps).read_text()) if args.steps.endswith(".json") \
        else json.loads(args.steps)
    payload = chain_payload(bundle, {"steps": steps, "theta": args.theta})
    _write_or_print(json.dumps(payload, sort_keys=True, indent=2) + "\n", args.out)
    return 0


def _cmd_pipeline(args) -> int:
    config = load_config(args.config)
    try:
        bundle = run_pipeline(config)
    except PipelineError as e:
        print(f"pipeline failed: {e}", file=sys.stderr)
        return 1
    save_bundle(bundle, args.out)
    print(f"wrote bundle with maps for {', '.join(bundle.viewpoint_ids)} to {args.out}")
    return 0


def _cmd_serve(args) -> int:
    bundle = load_bundle(args.bundle)
    server = serve_api(bundle, args.host, args.port, ui_dir=args.ui_dir)
    host, port = server.server_address[:2]
    print(f"serving read-only API on http://{host}:{port}/api/v1 (Ctrl-C to stop)")
    if args.ui_dir:
        print(f"serving the explorer UI from {args.ui_dir} at http://{host}:{port}/")
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mvsom",
        description="Multi-viewpoint self-organizing-map workbench",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="convert input data into the dataset format")
    p.add_argument("--input", required=True)
    p.add_argument("--format", choices=["dataset", "triples"], default=None)
    p.add_argument("--site-records", action="store_true",
                   help="treat input as a site-record table")
    p.add_argument("--domain-code", default=None)
    p.add_argument("--geo-prefix", default=None)
    p.add_argument("--universe", default=None,
                   help="JSON file listing allowed link endpoints")
    p.add_argument("--dedup-links", action="store_true")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_ingest)

    p = sub.add_parser("synth", help="generate a seeded synthetic dataset")
    p.add_argument("--items", type=int, required=True)
    p.add_argument("--groups", type=int, required=True)
    p.add_argument("--coupling", type=float, default=1.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--viewpoint", action="append", required=True,
                   help="name:features[:items], repeatable")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_synth)

    p = sub.add_parser("scan", help="scan square map sizes for one viewpoint")
    p.add_argument("--dataset", required=True)
    p.add_argument("--viewpoint", required=True)
    p.add_argument("--min-side", type=int, default=3)
    p.add_argument("--max-side", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_scan)

    p = sub.add_parser("train", help="train one map at a fixed size")
    p.add_argument("--dataset", required=True)
    p.add_argument("--viewpoint", required=True)
    p.add_argument("--side", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_train)

    p = sub.add_parser("zone", help="label and zone a trained map")
    p.add_argument("--model", required=True)
    p.add_argument("--dataset", required=True)
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_zone)

    p = sub.add_parser("consistency", help="export a bundle's consistency matrix")
    p.add_argument("--bundle", required=True)
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_consistency)

    p = sub.add_parser("propagate", help="propagate activity between two maps")
    p.add_argument("--bundle", required=True)
    p.add_argument("--source", required=True)
    p.add_argument("--target", required=True)
    p.add_argument("--nodes", default=None, help="comma-separated node indices")
    p.add_argument("--area", type=int, default=None)
    p.add_argument("--theta", type=float, default=DEFAULT_FOCUS_THRESHOLD)
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_propagate)

    p = sub.add_parser("chain", help="run a multi-step propagation chain")
    p.add_argument("--bundle", required=True)
    p.add_argument("--steps", required=True,
                   help="JSON list of steps, inline or a .json file path")
    p.add_argument("--theta", type=float, default=DEFAULT_FOCUS_THRESHOLD)
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_chain)

    p = sub.add_parser("pipeline", help="run the full config-driven pipeline")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_pipeline)

    p = sub.add_parser("serve", help="serve the read-only query API")
    p.add_argument("--bundle", required=True)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8742)
    p.add_argument("--ui-dir", default=None,
                   help="also serve this directory as the explorer UI")
    p.set_defaults(func=_cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "propagate" and args.area is None and not args.nodes:
        print("propagate requires --nodes or --area", file=sys.stderr)
        return 2
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
