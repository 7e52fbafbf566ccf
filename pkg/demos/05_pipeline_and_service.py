#!/usr/bin/env python3
"""Config-driven pipeline into a workspace bundle, queried over HTTP.

The bundle is a single self-contained JSON document; the service is a
read-only view of it, so every response is reproducible from the file
alone.
"""

import json
import tempfile
import threading
import urllib.request
from pathlib import Path

from mvsom.pipeline import PipelineConfig, run_pipeline, save_bundle
from mvsom.service import serve_api

workdir = Path(tempfile.mkdtemp(prefix="mvsom-demo-"))

config = PipelineConfig.from_dict(
    {
        "input": {
            "kind": "synthetic",
            "spec": {
                "item_count": 48,
                "features": {"towns": 12, "outlinks": 20},
                "group_count": 4,
                "coupling": 1.0,
                "seed": 8,
            },
        },
        "scan": {"min_side": 2, "max_side": 4},
        "seed": 8,
        "theta": 0.1,
    }
)

bundle = run_pipeline(config)
bundle_path = workdir / "bundle.json"
save_bundle(bundle, bundle_path)
print(f"bundle written to {bundle_path} "
      f"({bundle_path.stat().st_size / 1024:.0f} KiB)")
print("chosen sizes:", {vp: s.chosen_size for vp, s in bundle.scans.items()})

server = serve_api(bundle, host="127.0.0.1", port=0)
host, port = server.server_address[:2]
threading.Thread(target=server.serve_forever, daemon=True).start()
print(f"service listening on http://{host}:{port}/api/v1\n")

def get(path):
    with urllib.request.urlopen(f"http://{host}:{port}{path}") as resp:
        return json.loads(resp.read())

def post(path, body):
    req = urllib.request.Request(
        f"http://{host}:{port}{path}",
        data=json.dumps(body).encode(),
        headers={"Content-Type": "application/json"},
        method="POST",
    )
    with urllib.request.urlopen(req) as resp:
        return json.loads(resp.read())

print("GET /maps ->", json.dumps(get("/api/v1/maps"), indent=2)[:400], "...")
matrix = get("/api/v1/consistency")
print("\nconsistency values:", matrix["values"])

source_node = get("/api/v1/maps/towns")["nodes"][0]["index"]
payload = post(
    "/api/v1/propagate",
    {"source_map": "towns", "target_map": "outlinks", "nodes": [source_node]},
)
print(f"\npropagate node {source_node}: activity_total={payload['activity_total']}")
print("focus:", payload["focus"])

server.shutdown()
server.server_close()
