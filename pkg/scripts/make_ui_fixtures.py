#!/usr/bin/env python3
"""Regenerate the frontend test fixtures from real service payloads.

Runs the pipeline on the coupled two-viewpoint fixture and captures the
exact JSON the query service returns, so UI snapshot tests compare rendered
output against genuine payloads.  Output is deterministic; rerunning must
not change the committed files.
"""

import json
import tempfile
from pathlib import Path

from mvsom import refinement_dataset, save_dataset
from mvsom.pipeline import PipelineConfig, run_pipeline
from mvsom.service import (
    chain_payload,
    consistency_detail_payload,
    consistency_payload,
    map_detail_payload,
    maps_payload,
    meta_payload,
    propagate_payload,
)

OUT_DIR = Path(__file__).resolve().parent.parent / "frontend" / "test" / "fixtures"

CONFIG = {
    "input": {
        "kind": "synthetic",
        "spec": {
            "item_count": 48,
            "features": {"alpha": 16, "beta": 16},
            "group_count": 4,
            "coupling": 1.0,
            "seed": 11,
        },
    },
    "scan": {"min_side": 2, "max_side": 2},
    "seed": 2,
    "theta": 0.1,
}


def main() -> None:
    bundle = run_pipeline(PipelineConfig.from_dict(CONFIG))
    start = bundle.projections["alpha"].non_empty_nodes()[0]

    propagate_body = {
        "source_map": "alpha",
        "target_map": "beta",
        "nodes": [start],
        "theta": 0.1,
    }
    chain_body = {
        "steps": [
            {"source_map": "alpha", "target_map": "beta", "nodes": [start]},
            {"source_map": "beta", "target_map": "alpha"},
        ],
        "theta": 0.1,
    }

    # a second bundle with an asymmetric consistency matrix, for heatmap tests
    with tempfile.TemporaryDirectory() as tmp:
        ds_path = Path(tmp) / "refinement.json"
        save_dataset(refinement_dataset(seed=0), ds_path)
        varied = run_pipeline(
            PipelineConfig.from_dict(
                {
                    "input": {"kind": "dataset", "path": str(ds_path)},
                    "scan": {"min_side": 2, "max_side": 4},
                    "seed": 0,
                }
            )
        )

    fixtures = {
        "meta.json": meta_payload(bundle),
        "maps.json": maps_payload(bundle),
        "map_alpha.json": map_detail_payload(bundle, "alpha"),
        "map_beta.json": map_detail_payload(bundle, "beta"),
        "consistency.json": consistency_payload(bundle),
        "consistency_alpha_beta.json": consistency_detail_payload(
            bundle, "alpha", "beta"
        ),
        "consistency_varied.json": consistency_payload(varied),
        "propagate.json": propagate_payload(bundle, propagate_body),
        "chain.json": chain_payload(bundle, chain_body),
    }

    # the committed chain fixture must actually return home: the backward
    # step's focus has to contain every original source node
    backward = fixtures["chain.json"]["steps"][1]
    for node in fixtures["chain.json"]["steps"][0]["source_nodes"]:
        assert node in backward["focus"], (
            f"backward focus {backward['focus']} misses source node {node}"
        )
    total = fixtures["propagate.json"]["activity_total"]
    assert abs(total - 1.0) <= 1e-9, f"activity total {total}"

    OUT_DIR.mkdir(parents=True, exist_ok=True)
    for name, payload in fixtures.items():
        path = OUT_DIR / name
        path.write_text(json.dumps(payload, sort_keys=True, indent=2) + "\n")
        print(f"wrote {path}")


if __name__ == "__main__":
    main()
