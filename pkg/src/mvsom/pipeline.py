"""Config-driven pipeline: ingest, scan, train, zone, consistency, persist.

A single declarative config produces a self-contained workspace bundle:
the dataset, one chosen map per viewpoint with its projection, node labels
and information areas, the size-scan reports, and the full consistency
matrix.  Bundles serialize to canonical JSON, so identical config + seed
yields byte-identical files.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from . import ingest
from .ingest import ParseError, SyntheticSpec, dataset_from_dict, dataset_to_dict
from .propagation import (
    ConsistencyMatrix,
    ConsistencyReport,
    SourceDetail,
    consistency_matrix,
)
from .quality import QualityReport, ScanResult, scan_map_sizes
from .som import (
    Projection,
    SomMap,
    TrainingParams,
    model_from_dict,
    model_to_dict,
    project_data,
    train_som,
)
from .topology import InformationArea, label_nodes, zone_map
from .viewpoints import Dataset

__all__ = [
    "PipelineConfig",
    "PipelineError",
    "WorkspaceBundle",
    "run_pipeline",
    "save_bundle",
    "load_bundle",
    "bundle_to_dict",
    "bundle_from_dict",
    "load_config",
]

BUNDLE_FORMAT_VERSION = 1

DEFAULT_SCAN_MIN = 3
DEFAULT_SCAN_MAX = 20
DEFAULT_THETA = 0.1


class PipelineError(RuntimeError):
    """A pipeline stage failed; the message names the stage."""

    def __init__(self, stage: str, cause: Exception):
        super().__init__(f"stage {stage!r}: {cause}")
        self.stage = stage
        self.cause = cause


@dataclass(frozen=True)
class PipelineConfig:
    """Declarative pipeline configuration with all defaults resolved."""

    input: dict
    seed: int = 0
    theta: float = DEFAULT_THETA
    scan_min: int = DEFAULT_SCAN_MIN
    scan_max: int = DEFAULT_SCAN_MAX
    viewpoints: tuple[str, ...] | None = None
    training: dict | None = None
    unit_norm: bool = False

    @classmethod
    def from_dict(cls, doc: dict) -> "PipelineConfig":
        scan = doc.get("scan", {})
        viewpoints = doc.get("viewpoints")
        return cls(
            input=doc["input"],
            seed=int(doc.get("seed", 0)),
            theta=float(doc.get("theta", DEFAULT_THETA)),
            scan_min=int(scan.get("min_side", DEFAULT_SCAN_MIN)),
            scan_max=int(scan.get("max_side", DEFAULT_SCAN_MAX)),
            viewpoints=tuple(viewpoints) if viewpoints else None,
            training=doc.get("training"),
            unit_norm=bool(doc.get("unit_norm", False)),
        )

    def to_dict(self) -> dict:
        return {
            "input": self.input,
            "seed": self.seed,
            "theta": self.theta,
            "scan": {"min_side": self.scan_min, "max_side": self.scan_max},
            "viewpoints": list(self.viewpoints) if self.viewpoints else None,
            "training": self.training,
            "unit_norm": self.unit_norm,
        }


def load_config(path: str | Path) -> PipelineConfig:
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as e:
        raise ParseError(
            f"{path}: malformed JSON at line {e.lineno}, column {e.colno}"
        ) from e
    return PipelineConfig.from_dict(doc)


@dataclass
class WorkspaceBundle:
    """Everything the query service and the explorer need, in one place."""

    dataset: Dataset
    soms: dict[str, SomMap]
    projections: dict[str, Projection]
    labels: dict[str, dict[int, str | None]]
    zoning: dict[str, list[InformationArea]]
    scans: dict[str, ScanResult]
    consistency: ConsistencyMatrix
    config: PipelineConfig
    format_version: int = BUNDLE_FORMAT_VERSION

    @property
    def viewpoint_ids(self) -> tuple[str, ...]:
        return tuple(self.soms)

    @property
    def theta(self) -> float:
        return self.config.theta


def _ingest(config: PipelineConfig) -> Dataset:
    spec = config.input
    kind = spec.get("kind")
    if kind in ("dataset", "triples"):
        return ingest.load_dataset(spec["path"], format=kind)
    if kind == "site-records":
        records = ingest.load_site_records(spec["path"])
        if "domain_code" in spec or "geo_prefix" in spec:
            records = ingest.filter_kernel(
                records, spec.get("domain_code", ""), spec.get("geo_prefix", "")
            )
        universe = spec.get("universe")
        if universe is None:
            universe = {r.url for r in records}
        elif isinstance(universe, str):
            universe = set(json.loads(Path(universe).read_text()))
        else:
            universe = set(universe)
        records = ingest.restrict_links(records, universe)
        return ingest.records_to_viewpoints(
            records, dedup_links=bool(spec.get("dedup_links", False))
        )
    if kind == "synthetic":
        raw = dict(spec["spec"])
        raw["features"] = {k: int(v) for k, v in raw["features"].items()}
        if "item_coverage" in raw:
            raw["item_coverage"] = {k: int(v) for k, v in raw["item_coverage"].items()}
        if "weight_ranges" in raw:
            raw["weight_ranges"] = {
                k: (int(v[0]), int(v[1])) for k, v in raw["weight_ranges"].items()
            }
        return ingest.generate_synthetic(SyntheticSpec(**raw))
    raise ValueError(f"unknown input kind {kind!r}")


def _training_params(config: PipelineConfig) -> TrainingParams | None:
    if config.training is None:
        return None
    return TrainingParams(**config.training)


def run_pipeline(config: PipelineConfig) -> WorkspaceBundle:
    """Execute the full pipeline; any stage error aborts naming the stage."""
    try:
        dataset = _ingest(config)
    except Exception as e:
        raise PipelineError("ingest", e) from e

    wanted = config.viewpoints or dataset.viewpoint_ids
    for vp_id in wanted:
        if vp_id not in dataset.viewpoint_ids:
            raise PipelineError(
                "ingest", KeyError(f"config names missing viewpoint {vp_id!r}")
            )

    params = _training_params(config)
    scans: dict[str, ScanResult] = {}
    soms: dict[str, SomMap] = {}
    projections: dict[str, Projection] = {}
    for vp_id in wanted:
        matrix = dataset.viewpoint(vp_id)
        try:
            scans[vp_id] = scan_map_sizes(
                matrix,
                config.scan_min,
                config.scan_max,
                params=params,
                seed=config.seed,
                unit_norm=config.unit_norm,
            )
        except Exception as e:
            raise PipelineError("scan", e) from e
        side = scans[vp_id].chosen_size
        try:
            soms[vp_id] = train_som(
                matrix, side, side, params=params, seed=config.seed,
                unit_norm=config.unit_norm,
            )
            projections[vp_id] = project_data(soms[vp_id], matrix)
        except Exception as e:
            raise PipelineError("train", e) from e

    labels: dict[str, dict[int, str | None]] = {}
    zoning: dict[str, list[InformationArea]] = {}
    for vp_id in wanted:
        try:
            matrix = dataset.viewpoint(vp_id)
            labels[vp_id] = label_nodes(soms[vp_id], projections[vp_id], matrix)
            zoning[vp_id] = zone_map(soms[vp_id], labels[vp_id], projections[vp_id])
        except Exception as e:
            raise PipelineError("zone", e) from e

    try:
        matrix_report = consistency_matrix(soms, projections)
    except Exception as e:
        raise PipelineError("consistency", e) from e

    return WorkspaceBundle(
        dataset=dataset,
        soms=soms,
        projections=projections,
        labels=labels,
        zoning=zoning,
        scans=scans,
        consistency=matrix_report,
        config=config,
    )


# ---------------------------------------------------------------------------
# bundle persistence


def _scan_to_dict(scan: ScanResult) -> dict:
    return {
        "chosen_size": scan.chosen_size,
        "entries": [
            {
                "side": side,
                "clusters": clusters,
                "recall": report.recall,
                "precision": report.precision,
                "f_measure": report.f_measure,
            }
            for side, clusters, report in scan.entries
        ],
    }


def _scan_from_dict(doc: dict) -> ScanResult:
    entries = tuple(
        (
            e["side"],
            e["clusters"],
            QualityReport(e["recall"], e["precision"], e["f_measure"], {}),
        )
        for e in doc["entries"]
    )
    return ScanResult(entries, doc["chosen_size"])


def _consistency_to_dict(cm: ConsistencyMatrix) -> dict:
    reports = {}
    for (src, tgt), report in sorted(cm.reports.items()):
        reports[f"{src}->{tgt}"] = {
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
    return {
        "viewpoints": list(cm.viewpoint_ids),
        "values": [list(row) for row in cm.values],
        "reports": reports,
    }


def _consistency_from_dict(doc: dict) -> ConsistencyMatrix:
    reports: dict[tuple[str, str], ConsistencyReport] = {}
    for key, rep in doc.get("reports", {}).items():
        src, tgt = key.split("->", 1)
        per_source = {
            int(node): SourceDetail(
                targets=tuple(tuple(c) for c in detail["targets"]),
                dispersion=detail["dispersion"],
                term=detail["term"],
            )
            for node, detail in rep["per_source"].items()
        }
        reports[(src, tgt)] = ConsistencyReport(
            source_map_id=src,
            target_map_id=tgt,
            value=rep["value"],
            per_source=per_source,
            counted_sources=tuple(rep["counted_sources"]),
            excluded_sources=tuple(rep["excluded_sources"]),
        )
    return ConsistencyMatrix(
        tuple(doc["viewpoints"]),
        tuple(tuple(row) for row in doc["values"]),
        reports,
    )


def bundle_to_dict(bundle: WorkspaceBundle) -> dict:
    return {
        "format_version": bundle.format_version,
        "kind": "workspace-bundle",
        "config": bundle.config.to_dict(),
        "dataset": dataset_to_dict(bundle.dataset),
        "maps": {vp: model_to_dict(som) for vp, som in bundle.soms.items()},
        "projections": {
            vp: {
                item: [node, sim]
                for item, (node, sim) in sorted(proj.assignments.items())
            }
            for vp, proj in bundle.projections.items()
        },
        "labels": {
            vp: {str(n): lab for n, lab in labels.items() if lab is not None}
            for vp, labels in bundle.labels.items()
        },
        "zoning": {
            vp: [
                {
                    "area_id": area.area_id,
                    "label": area.dominant_label,
                    "nodes": sorted(area.node_indices),
                    "member_items": sorted(area.member_items),
                }
                for area in areas
            ]
            for vp, areas in bundle.zoning.items()
        },
        "scans": {vp: _scan_to_dict(scan) for vp, scan in bundle.scans.items()},
        "consistency": _consistency_to_dict(bundle.consistency),
    }


def bundle_from_dict(doc: dict) -> WorkspaceBundle:
    if doc.get("kind") != "workspace-bundle":
        raise ParseError(f"expected kind 'workspace-bundle', got {doc.get('kind')!r}")
    if doc.get("format_version") != BUNDLE_FORMAT_VERSION:
        raise ParseError(f"unsupported bundle version {doc.get('format_version')!r}")
    soms = {vp: model_from_dict(m) for vp, m in doc["maps"].items()}
    projections = {
        vp: Projection(vp, {i: (int(n), float(s)) for i, (n, s) in rows.items()})
        for vp, rows in doc["projections"].items()
    }
    labels: dict[str, dict[int, str | None]] = {}
    for vp, named in doc["labels"].items():
        full: dict[int, str | None] = {
            n: None for n in range(soms[vp].node_count)
        }
        for n, lab in named.items():
            full[int(n)] = lab
        labels[vp] = full
    zoning = {
        vp: [
            InformationArea(
                area_id=a["area_id"],
                node_indices=frozenset(a["nodes"]),
                dominant_label=a["label"],
                member_items=frozenset(a["member_items"]),
            )
            for a in areas
        ]
        for vp, areas in doc["zoning"].items()
    }
    return WorkspaceBundle(
        dataset=dataset_from_dict(doc["dataset"]),
        soms=soms,
        projections=projections,
        labels=labels,
        zoning=zoning,
        scans={vp: _scan_from_dict(s) for vp, s in doc["scans"].items()},
        consistency=_consistency_from_dict(doc["consistency"]),
        config=PipelineConfig.from_dict(doc["config"]),
    )


def save_bundle(bundle: WorkspaceBundle, path: str | Path) -> None:
    """Write the bundle as canonical JSON (sorted keys, fixed layout)."""
    Path(path).write_text(
        json.dumps(bundle_to_dict(bundle), sort_keys=True, indent=2) + "\n"
    )


def load_bundle(path: str | Path) -> WorkspaceBundle:
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as e:
        raise ParseError(
            f"{path}: malformed JSON at line {e.lineno}, column {e.colno}"
        ) from e
    return bundle_from_dict(doc)
