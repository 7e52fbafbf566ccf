"""Read-only HTTP query service over a workspace bundle.

All endpoints are deterministic functions of the immutable bundle, so the
threaded stdlib server needs no locking.  Payload builders are plain
functions and shared with the CLI, which keeps both surfaces numerically
identical.

Endpoints (JSON request/response, paths versioned under /api/v1):

  GET  /api/v1/meta                          bundle metadata
  GET  /api/v1/maps                          map summaries
  GET  /api/v1/maps/{id}                     grid, labels, zoning, members
  GET  /api/v1/consistency                   full consistency matrix
  GET  /api/v1/consistency/{src}/{tgt}       per-source-node detail
  POST /api/v1/propagate                     one propagation
  POST /api/v1/chain                         multi-step chain
"""

from __future__ import annotations

import json
import mimetypes
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path

from .pipeline import WorkspaceBundle
from .propagation import ChainStep, PropagationResult, activate, chain_propagation, propagate

__all__ = [
    "serve_api",
    "MapServer",
    "meta_payload",
    "maps_payload",
    "map_detail_payload",
    "consistency_payload",
    "consistency_detail_payload",
    "propagate_payload",
    "chain_payload",
    "NotFound",
    "BadRequest",
]

API_PREFIX = "/api/v1"


class NotFound(KeyError):
    pass


class BadRequest(ValueError):
    pass


def meta_payload(bundle: WorkspaceBundle) -> dict:
    return {
        "format_version": bundle.format_version,
        "seed": bundle.config.seed,
        "theta": bundle.theta,
        "scan": {"min_side": bundle.config.scan_min, "max_side": bundle.config.scan_max},
        "viewpoints": list(bundle.viewpoint_ids),
        "item_count": len(bundle.dataset.items),
    }


def maps_payload(bundle: WorkspaceBundle) -> list[dict]:
    out = []
    for vp_id, som in bundle.soms.items():
        proj = bundle.projections[vp_id]
        out.append(
            {
                "id": vp_id,
                "width": som.width,
                "height": som.height,
                "chosen_size": bundle.scans[vp_id].chosen_size if vp_id in bundle.scans else som.width,
                "non_empty_nodes": len(proj.non_empty_nodes()),
                "projected_items": len(proj.assignments),
            }
        )
    return out


def _require_map(bundle: WorkspaceBundle, map_id: str):
    if map_id not in bundle.soms:
        raise NotFound(f"unknown map {map_id!r}")
    return bundle.soms[map_id]


def map_detail_payload(bundle: WorkspaceBundle, map_id: str) -> dict:
    som = _require_map(bundle, map_id)
    proj = bundle.projections[map_id]
    labels = bundle.labels[map_id]
    members = proj.members_by_node()
    nodes = []
    for node in range(som.node_count):
        a, b = som.node_coords(node)
        nodes.append(
            {
                "index": node,
                "a": a,
                "b": b,
                "label": labels.get(node),
                "member_count": len(members.get(node, ())),
                "member_items": sorted(members.get(node, ())),
            }
        )
    areas = [
        {
            "area_id": area.area_id,
            "label": area.dominant_label,
            "nodes": sorted(area.node_indices),
            "member_items": sorted(area.member_items),
        }
        for area in bundle.zoning[map_id]
    ]
    return {
        "id": map_id,
        "width": som.width,
        "height": som.height,
        "nodes": nodes,
        "areas": areas,
    }


def consistency_payload(bundle: WorkspaceBundle) -> dict:
    cm = bundle.consistency
    return {
        "viewpoints": list(cm.viewpoint_ids),
        "values": [list(row) for row in cm.values],
    }


def consistency_detail_payload(
    bundle: WorkspaceBundle, source_id: str, target_id: str
) -> dict:
    key = (source_id, target_id)
    if key not in bundle.consistency.reports:
        raise NotFound(f"no consistency report for {source_id!r} -> {target_id!r}")
    report = bundle.consistency.reports[key]
    return {
        "source": source_id,
        "target": target_id,
        "value": report.value,
        "counted_sources": list(report.counted_sources),
        "excluded_sources": list(report.excluded_sources),
        "per_source": {
            str(node): {
                "targets": [list(c) for c in detail.targets],
                "dispersion": detail.dispersion,
                "term": detail.term,
            }
            for node, detail in sorted(report.per_source.items())
        },
    }


def _result_payload(
    bundle: WorkspaceBundle, result: PropagationResult, theta: float
) -> dict:
    som = bundle.soms[result.target_map_id]
    activity = [
        {
            "node": node,
            "a": som.node_coords(node)[0],
            "b": som.node_coords(node)[1],
            "activity": value,
            "posterior": result.posterior.get(node, 0.0),
        }
        for node, value in sorted(result.activity.items())
    ]
    return {
        "source_map": result.activation.source_map_id if result.activation else None,
        "source_nodes": sorted(result.activation.activated_nodes)
        if result.activation
        else [],
        "target_map": result.target_map_id,
        "has_carriers": result.has_carriers,
        "carriers": list(result.carriers),
        "activity": activity,
        "activity_total": result.activity_total,
        "theta": theta,
        "focus": sorted(result.focus(theta)),
    }


def _selection_nodes(bundle: WorkspaceBundle, map_id: str, body: dict) -> set[int]:
    som = _require_map(bundle, map_id)
    if "area" in body and body["area"] is not None:
        area_id = body["area"]
        for area in bundle.zoning[map_id]:
            if area.area_id == area_id:
                return set(area.node_indices)
        raise NotFound(f"unknown area {area_id!r} on map {map_id!r}")
    nodes = body.get("nodes")
    if not nodes:
        raise BadRequest("selection requires 'nodes' or 'area'")
    out = set()
    for node in nodes:
        if not isinstance(node, int) or not 0 <= node < som.node_count:
            raise BadRequest(f"invalid node index {node!r} for map {map_id!r}")
        out.add(node)
    return out


def propagate_payload(bundle: WorkspaceBundle, body: dict) -> dict:
    for key in ("source_map", "target_map"):
        if key not in body:
            raise BadRequest(f"missing field {key!r}")
    source_id, target_id = body["source_map"], body["target_map"]
    _require_map(bundle, source_id)
    _require_map(bundle, target_id)
    theta = float(body.get("theta", bundle.theta))
    nodes = _selection_nodes(bundle, source_id, body)
    act = activate(bundle.soms[source_id], nodes)
    result = propagate(
        act, bundle.projections[source_id], bundle.projections[target_id]
    )
    return _result_payload(bundle, result, theta)


def chain_payload(bundle: WorkspaceBundle, body: dict) -> dict:
    steps_doc = body.get("steps")
    if not steps_doc:
        raise BadRequest("chain requires a non-empty 'steps' list")
    theta = float(body.get("theta", bundle.theta))
    steps = []
    for i, step in enumerate(steps_doc, start=1):
        for key in ("source_map", "target_map"):
            if key not in step:
                raise BadRequest(f"step {i}: missing field {key!r}")
        _require_map(bundle, step["source_map"])
        _require_map(bundle, step["target_map"])
        selection = None
        if step.get("nodes") is not None or step.get("area") is not None:
            selection = frozenset(
                _selection_nodes(bundle, step["source_map"], step)
            )
        steps.append(ChainStep(step["source_map"], step["target_map"], selection))
    try:
        results = chain_propagation(bundle.soms, bundle.projections, steps, theta)
    except ValueError as e:
        raise BadRequest(str(e)) from e
    return {
        "theta": theta,
        "steps": [_result_payload(bundle, r, theta) for r in results],
    }


class _Handler(BaseHTTPRequestHandler):
    bundle: WorkspaceBundle = None  # set by MapServer
    ui_dir: Path | None = None
    protocol_version = "HTTP/1.1"

    def log_message(self, format, *args):  # quiet by default
        pass

    def _send(self, status: int, payload) -> None:
        body = json.dumps(payload, sort_keys=True).encode()
        self.send_response(status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(body)))
        self.send_header("Access-Control-Allow-Origin", "*")
        self.send_header("Access-Control-Allow-Headers", "Content-Type")
        self.send_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS")
        self.end_headers()
        self.wfile.write(body)

    def do_OPTIONS(self):
        self._send(204, {})

    def do_GET(self):
        if not self.path.startswith(API_PREFIX) and self.ui_dir is not None:
            self._send_static(self.path)
            return
        try:
            self._send(200, self._route_get(self.path))
        except NotFound as e:
            self._send(404, {"error": str(e.args[0]) if e.args else "not found"})
        except BadRequest as e:
            self._send(400, {"error": str(e)})

    def _send_static(self, path: str) -> None:
        relative = path.split("?", 1)[0].lstrip("/") or "index.html"
        target = (self.ui_dir / relative).resolve()
        if not str(target).startswith(str(self.ui_dir.resolve())) or not target.is_file():
            self._send(404, {"error": f"no such file {relative!r}"})
            return
        body = target.read_bytes()
        ctype = mimetypes.guess_type(target.name)[0] or "application/octet-stream"
        self.send_response(200)
        self.send_header("Content-Type", ctype)
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def do_POST(self):
        try:
            length = int(self.headers.get("Content-Length", 0))
            raw = self.rfile.read(length) if length else b"{}"
            try:
                body = json.loads(raw.decode())
            except json.JSONDecodeError as e:
                raise BadRequest(f"malformed JSON body: {e}") from e
            self._send(200, self._route_post(self.path, body))
        except NotFound as e:
            self._send(404, {"error": str(e.args[0]) if e.args else "not found"})
        except BadRequest as e:
            self._send(400, {"error": str(e)})

    def _route_get(self, path: str):
        bundle = self.bundle
        if path == f"{API_PREFIX}/meta":
            return meta_payload(bundle)
        if path == f"{API_PREFIX}/maps":
            return maps_payload(bundle)
        if path.startswith(f"{API_PREFIX}/maps/"):
            return map_detail_payload(bundle, path[len(f"{API_PREFIX}/maps/"):])
        if path == f"{API_PREFIX}/consistency":
            return consistency_payload(bundle)
        if path.startswith(f"{API_PREFIX}/consistency/"):
            rest = path[len(f"{API_PREFIX}/consistency/"):]
            parts = rest.split("/")
            if len(parts) != 2:
                raise BadRequest("expected /consistency/{source}/{target}")
            return consistency_detail_payload(bundle, parts[0], parts[1])
        raise NotFound(f"unknown path {path!r}")

    def _route_post(self, path: str, body: dict):
        if path == f"{API_PREFIX}/propagate":
            return propagate_payload(self.bundle, body)
        if path == f"{API_PREFIX}/chain":
            return chain_payload(self.bundle, body)
        raise NotFound(f"unknown path {path!r}")


class MapServer(ThreadingHTTPServer):
    """Threaded HTTP server bound to one immutable bundle."""

    daemon_threads = True
    # wide accept backlog: bursts of concurrent clients are the normal case
    request_queue_size = 128

    def __init__(
        self,
        bundle: WorkspaceBundle,
        address: tuple[str, int],
        ui_dir: str | Path | None = None,
    ):
        handler = type(
            "BoundHandler",
            (_Handler,),
            {"bundle": bundle, "ui_dir": Path(ui_dir) if ui_dir else None},
        )
        super().__init__(address, handler)
        self.bundle = bundle


def serve_api(
    bundle: WorkspaceBundle,
    host: str = "127.0.0.1",
    port: int = 8742,
    ui_dir: str | Path | None = None,
) -> MapServer:
    """Create (but do not start) the service; call ``serve_forever`` to run.

    With ``ui_dir`` set, non-API GET paths serve static files from that
    directory (read-only), which is how the browser explorer is hosted.
    """
    return MapServer(bundle, (host, port), ui_dir=ui_dir)
