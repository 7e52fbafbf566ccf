"""Dataset ingestion: file formats, site-record preparation, fixtures.

Three input forms are supported:

* ``dataset`` - one JSON document holding items plus all viewpoints;
* ``triples`` - a directory of per-viewpoint ``<id>.triples.csv`` files
  (``item,feature,weight`` rows) plus an optional ``items.csv``;
* ``site-records`` - a JSON table of website descriptions that is merged,
  filtered to a kernel, link-restricted to a universe, and converted into
  the four standard viewpoints (towns, sub-domains, outlinks, inlinks).

Synthetic generators produce seeded datasets with planted group structure
for experiments and tests.
"""

from __future__ import annotations

import csv
import json
import logging
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .viewpoints import (
    DataItem,
    Dataset,
    ViewpointMatrix,
    build_viewpoint_matrix,
)

__all__ = [
    "SiteRecord",
    "SyntheticSpec",
    "ParseError",
    "merge_site_tables",
    "filter_kernel",
    "restrict_links",
    "records_to_viewpoints",
    "generate_synthetic",
    "refinement_dataset",
    "generate_site_corpus",
    "SiteCorpus",
    "load_dataset",
    "save_dataset",
    "load_site_records",
    "save_site_records",
    "dataset_to_dict",
    "dataset_from_dict",
    "DATASET_FORMAT_VERSION",
]

logger = logging.getLogger(__name__)

DATASET_FORMAT_VERSION = 1

TOWNS = "towns"
SUB_DOMAINS = "sub-domains"
OUTLINKS = "outlinks"
INLINKS = "inlinks"


class ParseError(ValueError):
    """Malformed input file; message carries file and position context."""


@dataclass(frozen=True)
class SiteRecord:
    """Global description of one website."""

    url: str
    organization: str = ""
    geo_code: str = ""
    domain_codes: tuple[str, ...] = ()
    inlinks: tuple[tuple[str, int], ...] = ()
    outlinks: tuple[tuple[str, int], ...] = ()
    page_count: int = 0

    def __post_init__(self) -> None:
        if not self.url:
            raise ValueError("site record requires a url")
        for link_url, count in (*self.inlinks, *self.outlinks):
            if count < 0:
                raise ValueError(f"negative link count for {link_url!r}")


_SCALAR_FIELDS = ("organization", "geo_code", "page_count")
_LIST_FIELDS = ("domain_codes", "inlinks", "outlinks")


def merge_site_tables(tables: list[list[dict]]) -> list[SiteRecord]:
    """Fuse partial per-url description tables into one record per url.

    Fields union across tables; when two tables disagree on a field the
    later table wins and a warning is logged.  Output is sorted by url.
    """
    merged: dict[str, dict] = {}
    for t, table in enumerate(tables):
        for row in table:
            url = row.get("url")
            if not url:
                raise ValueError(f"table {t}: record with no url")
            slot = merged.setdefault(url, {"url": url})
            for key, value in row.items():
                if key == "url":
                    continue
                if key in slot and slot[key] != value:
                    logger.warning(
                        "conflicting field %r for %s: %r overrides %r",
                        key, url, value, slot[key],
                    )
                slot[key] = value
    records = []
    for url in sorted(merged):
        row = merged[url]
        records.append(
            SiteRecord(
                url=url,
                organization=row.get("organization", ""),
                geo_code=row.get("geo_code", ""),
                domain_codes=tuple(row.get("domain_codes", ())),
                inlinks=tuple((u, int(c)) for u, c in row.get("inlinks", ())),
                outlinks=tuple((u, int(c)) for u, c in row.get("outlinks", ())),
                page_count=int(row.get("page_count", 0)),
            )
        )
    return records


def filter_kernel(
    records: list[SiteRecord], domain_code: str, geo_prefix: str
) -> list[SiteRecord]:
    """Keep records carrying ``domain_code`` whose geo code starts with the prefix."""
    return [
        r
        for r in records
        if domain_code in r.domain_codes and r.geo_code.startswith(geo_prefix)
    ]


def restrict_links(
    records: list[SiteRecord], universe: set[str] | frozenset[str]
) -> list[SiteRecord]:
    """Drop links whose other endpoint lies outside ``universe``.

    Outlinks keep only targets in the universe, inlinks only sources;
    counts are preserved untouched.
    """
    out = []
    for r in records:
        out.append(
            replace(
                r,
                outlinks=tuple((u, c) for u, c in r.outlinks if u in universe),
                inlinks=tuple((u, c) for u, c in r.inlinks if u in universe),
            )
        )
    return out


def records_to_viewpoints(
    records: list[SiteRecord], dedup_links: bool = False
) -> Dataset:
    """Build the four standard viewpoints from merged, restricted records.

    Town and sub-domain features weigh 1 per occurrence; link features carry
    their counts (or 1 when ``dedup_links``).  Items with nothing to say in
    a viewpoint are simply absent from it.
    """
    if not records:
        raise ValueError("no records")
    towns: list[tuple[str, str, float]] = []
    domains: list[tuple[str, str, float]] = []
    outlinks: list[tuple[str, str, float]] = []
    inlinks: list[tuple[str, str, float]] = []
    for r in records:
        if r.geo_code:
            towns.append((r.url, r.geo_code, 1.0))
        for code in r.domain_codes:
            domains.append((r.url, code, 1.0))
        for target, count in r.outlinks:
            if count > 0:
                outlinks.append((r.url, target, 1.0 if dedup_links else float(count)))
        for source, count in r.inlinks:
            if count > 0:
                inlinks.append((r.url, source, 1.0 if dedup_links else float(count)))

    viewpoints = []
    for vp_id, triples in (
        (TOWNS, towns),
        (SUB_DOMAINS, domains),
        (OUTLINKS, outlinks),
        (INLINKS, inlinks),
    ):
        if triples:
            viewpoints.append(build_viewpoint_matrix(triples, vp_id))
    if not viewpoints:
        raise ValueError("all viewpoints empty")
    items = tuple(DataItem(r.url, r.organization or None) for r in records)
    return Dataset(items, tuple(viewpoints))


# ---------------------------------------------------------------------------
# synthetic fixtures


@dataclass(frozen=True)
class SyntheticSpec:
    """Recipe for a seeded dataset with planted group structure.

    Items are split into ``group_count`` groups; every viewpoint's features
    are split the same way, and each covered item carries its group's whole
    feature block with randomized weights.  ``coupling`` is the probability
    that an item keeps the shared grouping across all viewpoints; uncoupled
    items fall back to an independent grouping per viewpoint (1 = every
    viewpoint sees identical groups, 0 = independent groupings).
    """

    item_count: int
    features: dict[str, int]
    group_count: int
    coupling: float
    seed: int
    item_coverage: dict[str, int] = field(default_factory=dict)
    weight_ranges: dict[str, tuple[int, int]] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.item_count < 1:
            raise ValueError("item_count must be >= 1")
        if not self.features:
            raise ValueError("need at least one viewpoint")
        if not 1 <= self.group_count <= self.item_count:
            raise ValueError("group_count must lie in [1, item_count]")
        if not 0.0 <= self.coupling <= 1.0:
            raise ValueError("coupling must lie in [0, 1]")
        for vp, count in self.features.items():
            if count < self.group_count:
                raise ValueError(
                    f"viewpoint {vp!r} needs at least one feature per group"
                )
        for vp, cov in self.item_coverage.items():
            if vp not in self.features:
                raise ValueError(f"coverage names unknown viewpoint {vp!r}")
            if not self.group_count <= cov <= self.item_count:
                raise ValueError(
                    f"coverage for {vp!r} must lie in [group_count, item_count]"
                )


def _shuffled_round_robin(rng: np.random.Generator, n: int, groups: int) -> np.ndarray:
    base = np.arange(n) % groups
    return base[rng.permutation(n)]


def generate_synthetic(spec: SyntheticSpec) -> Dataset:
    """Deterministically generate a dataset per ``spec``."""
    rng = np.random.default_rng(spec.seed)
    n, g = spec.item_count, spec.group_count
    item_ids = [f"item{i:04d}" for i in range(n)]
    shared = _shuffled_round_robin(rng, n, g)
    coupled = rng.random(n) < spec.coupling

    viewpoints = []
    for vp in sorted(spec.features):
        f_count = spec.features[vp]
        independent = _shuffled_round_robin(rng, n, g)
        groups = np.where(coupled, shared, independent)

        coverage = spec.item_coverage.get(vp, n)
        if coverage >= n:
            covered = np.arange(n)
        else:
            # keep at least one item per group so every feature block is used
            covered_list = []
            for grp in range(g):
                members = np.flatnonzero(groups == grp)
                covered_list.append(int(rng.choice(members)))
            rest = np.setdiff1d(np.arange(n), np.array(covered_list))
            extra = rng.choice(rest, size=coverage - g, replace=False)
            covered = np.sort(np.concatenate([np.array(covered_list), extra]))

        lo, hi = spec.weight_ranges.get(vp, (1, 3))
        width = len(str(max(f_count - 1, 1)))
        feature_names = [f"{vp}_f{k:0{width}d}" for k in range(f_count)]
        triples: list[tuple[str, str, float]] = []
        for i in covered:
            grp = int(groups[i])
            block = range(grp, f_count, g)
            for k in block:
                triples.append(
                    (item_ids[i], feature_names[k], float(rng.integers(lo, hi + 1)))
                )
        viewpoints.append(build_viewpoint_matrix(triples, vp))

    items = tuple(DataItem(iid) for iid in item_ids)
    return Dataset(items, tuple(viewpoints))


def refinement_dataset(
    item_count: int = 64,
    fine_groups: int = 8,
    coarse_groups: int = 2,
    fine_features: int = 32,
    coarse_features: int = 8,
    seed: int = 0,
    fine_id: str = "fine",
    coarse_id: str = "coarse",
) -> Dataset:
    """Two viewpoints where the coarse grouping merges whole fine groups.

    Fine group ``gf`` maps to coarse group ``gf * coarse / fine`` (integer
    division), so the fine viewpoint strictly refines the coarse one.
    """
    if fine_groups % coarse_groups != 0:
        raise ValueError("fine_groups must be a multiple of coarse_groups")
    rng = np.random.default_rng(seed)
    n = item_count
    item_ids = [f"item{i:04d}" for i in range(n)]
    fine = _shuffled_round_robin(rng, n, fine_groups)
    coarse = fine * coarse_groups // fine_groups

    viewpoints = []
    for vp_id, groups, g, f_count in (
        (fine_id, fine, fine_groups, fine_features),
        (coarse_id, coarse, coarse_groups, coarse_features),
    ):
        width = len(str(max(f_count - 1, 1)))
        names = [f"{vp_id}_f{k:0{width}d}" for k in range(f_count)]
        triples = []
        for i in range(n):
            grp = int(groups[i])
            for k in range(grp, f_count, g):
                triples.append((item_ids[i], names[k], float(rng.integers(1, 4))))
        viewpoints.append(build_viewpoint_matrix(triples, vp_id))
    return Dataset(tuple(DataItem(i) for i in item_ids), tuple(viewpoints))


@dataclass(frozen=True)
class SiteCorpus:
    """Partial description tables plus the link universe they live in."""

    tables: tuple[tuple[dict, ...], ...]
    universe: frozenset[str]
    kernel_domain_code: str
    geo_prefix: str


def generate_site_corpus(
    seed: int = 0,
    kernel_size: int = 438,
    town_count: int = 96,
    domain_count: int = 93,
    outlink_emitters: int = 386,
    outlink_targets: int = 2079,
    inlink_receivers: int = 388,
    inlink_sources: int = 2839,
    decoy_count: int = 60,
    kernel_domain_code: str = "1203",
    geo_prefix: str = "DE",
) -> SiteCorpus:
    """Site-record corpus whose kernel reproduces the standard matrix shapes.

    After merge -> kernel filter -> link restriction -> viewpoint build, the
    four matrices come out ``kernel_size x town_count``, ``kernel_size x
    domain_count``, ``outlink_emitters x outlink_targets`` and
    ``inlink_receivers x inlink_sources``; inlink counts are drawn higher
    than outlink counts so total received weight exceeds total emitted.
    """
    if domain_count < 2 or town_count < 1:
        raise ValueError("need at least 2 domain codes and 1 town")
    if outlink_emitters > kernel_size or inlink_receivers > kernel_size:
        raise ValueError("emitter/receiver counts cannot exceed kernel size")
    rng = np.random.default_rng(seed)

    kernel_urls = [f"http://site{i:04d}.example.de/" for i in range(kernel_size)]
    towns = [f"{geo_prefix}-town{t:03d}" for t in range(town_count)]
    extra_codes = [f"c{k:03d}" for k in range(domain_count - 1)]
    out_pool = [f"http://cited{k:04d}.example.eu/" for k in range(outlink_targets)]
    in_pool = [f"http://citing{k:04d}.example.eu/" for k in range(inlink_sources)]
    external = [f"http://outside{k:03d}.example.com/" for k in range(40)]
    universe = frozenset(kernel_urls) | frozenset(out_pool) | frozenset(in_pool)

    emitters = sorted(rng.choice(kernel_size, size=outlink_emitters, replace=False))
    receivers = sorted(rng.choice(kernel_size, size=inlink_receivers, replace=False))

    out_map: dict[int, dict[str, int]] = {i: {} for i in emitters}
    for k, target in enumerate(out_pool):
        owner = emitters[k % len(emitters)]
        out_map[owner][target] = int(rng.integers(1, 4))
    in_map: dict[int, dict[str, int]] = {i: {} for i in receivers}
    for k, source in enumerate(in_pool):
        owner = receivers[k % len(receivers)]
        in_map[owner][source] = int(rng.integers(2, 7))

    geo_table: list[dict] = []
    domain_table: list[dict] = []
    link_table: list[dict] = []
    for i, url in enumerate(kernel_urls):
        geo_table.append(
            {
                "url": url,
                "organization": f"org{i:04d}",
                "geo_code": towns[i % town_count],
                "page_count": int(rng.integers(5, 200)),
            }
        )
        codes = [kernel_domain_code, extra_codes[i % len(extra_codes)]]
        if rng.random() < 0.3:
            codes.append(extra_codes[int(rng.integers(0, len(extra_codes)))])
        domain_table.append({"url": url, "domain_codes": sorted(set(codes))})

        outlinks = [(t, c) for t, c in sorted(out_map.get(i, {}).items())]
        if rng.random() < 0.25:
            outlinks.append((external[int(rng.integers(0, len(external)))], 1))
        inlinks = [(s, c) for s, c in sorted(in_map.get(i, {}).items())]
        if rng.random() < 0.25:
            inlinks.append((external[int(rng.integers(0, len(external)))], 2))
        link_table.append({"url": url, "outlinks": outlinks, "inlinks": inlinks})

    for d in range(decoy_count):
        url = f"http://decoy{d:03d}.example.fr/"
        bad_geo = d % 2 == 0
        geo_table.append(
            {
                "url": url,
                "organization": f"decoy{d:03d}",
                "geo_code": f"FR-town{d:03d}" if bad_geo else towns[d % town_count],
                "page_count": 10,
            }
        )
        codes = [kernel_domain_code] if bad_geo else [extra_codes[d % len(extra_codes)]]
        domain_table.append({"url": url, "domain_codes": codes})
        link_table.append({"url": url, "outlinks": [(out_pool[0], 1)], "inlinks": []})

    return SiteCorpus(
        tables=(tuple(geo_table), tuple(domain_table), tuple(link_table)),
        universe=universe,
        kernel_domain_code=kernel_domain_code,
        geo_prefix=geo_prefix,
    )


def site_corpus_to_dataset(corpus: SiteCorpus) -> Dataset:
    """Run the full preparation pipeline on a corpus."""
    records = merge_site_tables([list(t) for t in corpus.tables])
    kernel = filter_kernel(records, corpus.kernel_domain_code, corpus.geo_prefix)
    kernel = restrict_links(kernel, corpus.universe)
    return records_to_viewpoints(kernel)


# ---------------------------------------------------------------------------
# persistence


def dataset_to_dict(ds: Dataset) -> dict:
    viewpoints = []
    for vp in ds.viewpoints:
        rows = {
            item_id: [[idx, w] for idx, w in vec.entries]
            for item_id, vec in sorted(vp.rows.items())
        }
        viewpoints.append(
            {"id": vp.viewpoint_id, "features": list(vp.feature_names), "rows": rows}
        )
    items = []
    for item in ds.items:
        doc: dict = {"id": item.id}
        if item.label is not None:
            doc["label"] = item.label
        items.append(doc)
    return {
        "format_version": DATASET_FORMAT_VERSION,
        "kind": "dataset",
        "items": items,
        "viewpoints": viewpoints,
    }


def dataset_from_dict(doc: dict) -> Dataset:
    if doc.get("kind") != "dataset":
        raise ParseError(f"expected kind 'dataset', got {doc.get('kind')!r}")
    if doc.get("format_version") != DATASET_FORMAT_VERSION:
        raise ParseError(f"unsupported format version {doc.get('format_version')!r}")
    items = tuple(DataItem(d["id"], d.get("label")) for d in doc["items"])
    viewpoints = []
    for vp in doc["viewpoints"]:
        rows = {}
        for item_id, entries in vp["rows"].items():
            rows[item_id] = _sparse_from_entries(entries)
        viewpoints.append(
            ViewpointMatrix(vp["id"], tuple(vp["features"]), rows)
        )
    return Dataset(items, tuple(viewpoints))


def _sparse_from_entries(entries):
    from .viewpoints import SparseVector

    return SparseVector(tuple((int(i), float(w)) for i, w in entries))


def _load_json(path: Path) -> dict:
    text = path.read_text()
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(
            f"{path}: malformed JSON at line {e.lineno}, column {e.colno} "
            f"(char {e.pos})"
        ) from e


def save_dataset(ds: Dataset, path: str | Path, format: str = "dataset") -> None:
    """Write a dataset as a JSON document or a triples directory."""
    path = Path(path)
    if format == "dataset":
        path.write_text(
            json.dumps(dataset_to_dict(ds), sort_keys=True, indent=2) + "\n"
        )
    elif format == "triples":
        path.mkdir(parents=True, exist_ok=True)
        with open(path / "items.csv", "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["id", "label"])
            for item in ds.items:
                writer.writerow([item.id, item.label or ""])
        for vp in ds.viewpoints:
            with open(path / f"{vp.viewpoint_id}.triples.csv", "w", newline="") as fh:
                writer = csv.writer(fh)
                writer.writerow(["item", "feature", "weight"])
                for item_id in sorted(vp.rows):
                    for idx, w in vp.rows[item_id].entries:
                        writer.writerow([item_id, vp.feature_names[idx], repr(w)])
    else:
        raise ValueError(f"unknown format {format!r}")


def load_dataset(path: str | Path, format: str | None = None) -> Dataset:
    """Read a dataset back; ``format=None`` autodetects from the path."""
    path = Path(path)
    if format is None:
        format = "triples" if path.is_dir() else "dataset"
    if format == "dataset":
        return dataset_from_dict(_load_json(path))
    if format == "triples":
        return _load_triples_dir(path)
    raise ValueError(f"unknown format {format!r}")


def _load_triples_dir(path: Path) -> Dataset:
    triples_files = sorted(path.glob("*.triples.csv"))
    if not triples_files:
        raise ParseError(f"{path}: no *.triples.csv files found")
    labels: dict[str, str] = {}
    items_file = path / "items.csv"
    explicit_items: list[str] = []
    if items_file.exists():
        with open(items_file, newline="") as fh:
            reader = csv.DictReader(fh)
            for lineno, row in enumerate(reader, start=2):
                if not row.get("id"):
                    raise ParseError(f"{items_file}: line {lineno}: missing id")
                explicit_items.append(row["id"])
                if row.get("label"):
                    labels[row["id"]] = row["label"]

    viewpoints = []
    for file in triples_files:
        vp_id = file.name[: -len(".triples.csv")]
        triples: list[tuple[str, str, float]] = []
        with open(file, newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if header != ["item", "feature", "weight"]:
                raise ParseError(f"{file}: line 1: expected header item,feature,weight")
            for lineno, row in enumerate(reader, start=2):
                if len(row) != 3:
                    raise ParseError(
                        f"{file}: line {lineno}: expected 3 fields, got {len(row)}"
                    )
                try:
                    weight = float(row[2])
                except ValueError as e:
                    raise ParseError(
                        f"{file}: line {lineno}: bad weight {row[2]!r}"
                    ) from e
                triples.append((row[0], row[1], weight))
        viewpoints.append(build_viewpoint_matrix(triples, vp_id))

    if explicit_items:
        item_ids = explicit_items
    else:
        item_ids = sorted({i for vp in viewpoints for i in vp.rows})
    items = tuple(DataItem(i, labels.get(i)) for i in item_ids)
    return Dataset(items, tuple(viewpoints))


def save_site_records(records: list[SiteRecord], path: str | Path) -> None:
    docs = [
        {
            "url": r.url,
            "organization": r.organization,
            "geo_code": r.geo_code,
            "domain_codes": list(r.domain_codes),
            "inlinks": [[u, c] for u, c in r.inlinks],
            "outlinks": [[u, c] for u, c in r.outlinks],
            "page_count": r.page_count,
        }
        for r in records
    ]
    Path(path).write_text(
        json.dumps(
            {"format_version": DATASET_FORMAT_VERSION, "kind": "site-records",
             "records": docs},
            sort_keys=True,
            indent=2,
        )
        + "\n"
    )


def load_site_records(path: str | Path) -> list[SiteRecord]:
    doc = _load_json(Path(path))
    if doc.get("kind") != "site-records":
        raise ParseError(f"expected kind 'site-records', got {doc.get('kind')!r}")
    records = []
    for r in doc["records"]:
        records.append(
            SiteRecord(
                url=r["url"],
                organization=r.get("organization", ""),
                geo_code=r.get("geo_code", ""),
                domain_codes=tuple(r.get("domain_codes", ())),
                inlinks=tuple((u, int(c)) for u, c in r.get("inlinks", ())),
                outlinks=tuple((u, int(c)) for u, c in r.get("outlinks", ())),
                page_count=int(r.get("page_count", 0)),
            )
        )
    return records
