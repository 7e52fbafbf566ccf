"""Inter-map activity propagation and the consistency measure.

Data items projected onto two maps act as activity transmitters: activating
nodes on a source map injects each member item's source similarity as
evidence mass, which lands on the item's node in the target map.  Activity
per target node is that mass normalized by the total carried mass, so it
sums to 1 whenever any carrier exists.

Consistency of a source map toward a target map averages, over non-empty
source nodes, how focal the propagated activity is: a source node whose
members land on a single target node contributes 1, while spread across
distant target nodes is discounted by the mean pairwise grid distance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .som import Projection, SomMap
from .topology import InformationArea

__all__ = [
    "Activation",
    "PropagationResult",
    "ConsistencyReport",
    "ConsistencyMatrix",
    "SourceDetail",
    "ChainStep",
    "activate",
    "propagate",
    "node_posterior",
    "dispersion",
    "propagation_consistency",
    "consistency_matrix",
    "chain_propagation",
    "DEFAULT_FOCUS_THRESHOLD",
]

DEFAULT_FOCUS_THRESHOLD = 0.1


@dataclass(frozen=True)
class Activation:
    """A set of activated nodes on a source map carrying one modality."""

    source_map_id: str
    activated_nodes: frozenset[int]
    modality: str = "active"
    evidence_id: str = ""

    def __post_init__(self) -> None:
        if not self.activated_nodes:
            raise ValueError("activation requires at least one node")


def activate(
    som: SomMap, selection: InformationArea | frozenset[int] | set[int] | int,
    modality: str = "active", evidence_id: str = ""
) -> Activation:
    """Build an activation from a node, a node set, or an information area."""
    if isinstance(selection, InformationArea):
        nodes = set(selection.node_indices)
    elif isinstance(selection, int):
        nodes = {selection}
    else:
        nodes = set(selection)
    if not nodes:
        raise ValueError("empty selection")
    for node in nodes:
        if not 0 <= node < som.node_count:
            raise ValueError(f"node index {node} out of range for map {som.viewpoint_id!r}")
    return Activation(som.viewpoint_id, frozenset(nodes), modality, evidence_id)


@dataclass(frozen=True)
class PropagationResult:
    """Activity received by a target map from one source activation.

    ``activity`` is normalized carrier mass per target node (sums to 1 when
    carriers exist); ``posterior`` is the raw per-node evidence fraction
    from :func:`node_posterior`.
    """

    target_map_id: str
    activity: dict[int, float]
    posterior: dict[int, float]
    targets: frozenset[int]
    carriers: tuple[str, ...]
    activation: Activation | None = None

    @property
    def has_carriers(self) -> bool:
        return bool(self.carriers)

    @property
    def activity_total(self) -> float:
        return sum(self.activity.values())

    def focus(self, threshold: float = DEFAULT_FOCUS_THRESHOLD) -> frozenset[int]:
        """Target nodes whose activity reaches ``threshold``."""
        return frozenset(n for n, a in self.activity.items() if a >= threshold)


def _check_universes(source_proj: Projection, target_proj: Projection) -> None:
    if not set(source_proj.assignments) & set(target_proj.assignments):
        raise ValueError("projection universe mismatch: no shared items")


def propagate(
    act: Activation, source_proj: Projection, target_proj: Projection
) -> PropagationResult:
    """Send activity from activated source nodes to the target map.

    Carriers are items sitting on an activated source node and present in
    the target projection; each contributes its source-side similarity as
    mass to its target node.  With no carriers (or zero total mass) the
    result is empty and flagged via ``has_carriers``.
    """
    _check_universes(source_proj, target_proj)
    carriers = [
        item_id
        for item_id, (node, _) in source_proj.assignments.items()
        if node in act.activated_nodes and item_id in target_proj.assignments
    ]
    mass: dict[int, float] = {}
    total = 0.0
    for item_id in carriers:
        sim = source_proj.similarity_of(item_id)
        node = target_proj.node_of(item_id)
        mass[node] = mass.get(node, 0.0) + sim
        total += sim
    if not carriers or total <= 0.0:
        return PropagationResult(
            target_map_id=target_proj.viewpoint_id,
            activity={},
            posterior={},
            targets=frozenset(),
            carriers=(),
            activation=act,
        )
    activity = {node: m / total for node, m in sorted(mass.items()) if m > 0}
    targets = frozenset(activity)
    posterior = {
        node: node_posterior(node, act, source_proj, target_proj)
        for node in sorted(targets)
    }
    return PropagationResult(
        target_map_id=target_proj.viewpoint_id,
        activity=activity,
        posterior=posterior,
        targets=targets,
        carriers=tuple(sorted(carriers)),
        activation=act,
    )


def node_posterior(
    target_node: int,
    act: Activation,
    source_proj: Projection,
    target_proj: Projection,
) -> float:
    """Evidence fraction of one target node's members that carry the activity.

    Sums source-side similarities of the node's activated members over
    those of all its members (restricted to items present on both maps).
    An empty denominator is defined as 0.
    """
    numer = 0.0
    denom = 0.0
    for item_id, (node, _) in target_proj.assignments.items():
        if node != target_node:
            continue
        if item_id not in source_proj.assignments:
            continue
        sim = source_proj.similarity_of(item_id)
        denom += sim
        if source_proj.node_of(item_id) in act.activated_nodes:
            numer += sim
    if denom <= 0.0:
        return 0.0
    return numer / denom


def dispersion(targets: list[tuple[float, float]] | set[tuple[float, float]]) -> float:
    """Mean pairwise Euclidean distance over grid coordinates.

    A single coordinate has dispersion 0.
    """
    pts = sorted(targets)
    if not pts:
        raise ValueError("empty coordinate set")
    n = len(pts)
    if n == 1:
        return 0.0
    total = 0.0
    for i in range(n):
        ax, ay = pts[i]
        for j in range(i + 1, n):
            bx, by = pts[j]
            total += math.hypot(ax - bx, ay - by)
    return 2.0 * total / (n * (n - 1))


@dataclass(frozen=True)
class SourceDetail:
    """Per-source-node propagation summary inside a consistency report."""

    targets: tuple[tuple[int, int], ...]
    dispersion: float
    term: float


@dataclass(frozen=True)
class ConsistencyReport:
    """Focalization of one map's activity on another.

    ``value`` is the mean over counted source nodes of
    activity / (dispersion + 1); with the normalized activity this is
    1 / (dispersion + 1) per node, hence always in (0, 1].
    """

    source_map_id: str
    target_map_id: str
    value: float
    per_source: dict[int, SourceDetail]
    counted_sources: tuple[int, ...]
    excluded_sources: tuple[int, ...] = ()


def propagation_consistency(
    source_som: SomMap,
    target_som: SomMap,
    source_proj: Projection,
    target_proj: Projection,
) -> ConsistencyReport:
    """Score how focally every source node's activity lands on the target.

    Each non-empty source node is activated alone; its term is
    1 / (dispersion of activated target nodes + 1).  Source nodes with no
    carrier reaching the target are excluded from the average and reported.
    """
    per_source: dict[int, SourceDetail] = {}
    counted: list[int] = []
    excluded: list[int] = []
    for node in source_proj.non_empty_nodes():
        act = Activation(source_som.viewpoint_id, frozenset({node}))
        result = propagate(act, source_proj, target_proj)
        if not result.has_carriers:
            excluded.append(node)
            continue
        coords = tuple(sorted(target_som.node_coords(t) for t in result.targets))
        spread = dispersion([(float(a), float(b)) for a, b in coords])
        term = result.activity_total / (spread + 1.0)
        per_source[node] = SourceDetail(coords, spread, term)
        counted.append(node)
    if not counted:
        raise ValueError("disjoint universes: no source node propagates")
    value = sum(per_source[n].term for n in counted) / len(counted)
    return ConsistencyReport(
        source_map_id=source_som.viewpoint_id,
        target_map_id=target_som.viewpoint_id,
        value=value,
        per_source=per_source,
        counted_sources=tuple(counted),
        excluded_sources=tuple(excluded),
    )


@dataclass(frozen=True)
class ConsistencyMatrix:
    """Square consistency table, read row (source) toward column (target)."""

    viewpoint_ids: tuple[str, ...]
    values: tuple[tuple[float, ...], ...]
    reports: dict[tuple[str, str], ConsistencyReport] = field(default_factory=dict)

    def value(self, source_id: str, target_id: str) -> float:
        i = self.viewpoint_ids.index(source_id)
        j = self.viewpoint_ids.index(target_id)
        return self.values[i][j]

    def to_csv(self, delimiter: str = ",") -> str:
        lines = [delimiter.join(["source\\target", *self.viewpoint_ids])]
        for vp_id, row in zip(self.viewpoint_ids, self.values):
            lines.append(delimiter.join([vp_id, *(repr(v) for v in row)]))
        return "\n".join(lines) + "\n"


def consistency_matrix(
    soms: dict[str, SomMap], projections: dict[str, Projection]
) -> ConsistencyMatrix:
    """All ordered-pair consistencies, diagonal included.

    The diagonal is computed by genuine self-propagation (items return to
    their own nodes) and comes out exactly 1.
    """
    ids = tuple(soms)
    if len(ids) < 2:
        raise ValueError("need at least two maps")
    values: list[tuple[float, ...]] = []
    reports: dict[tuple[str, str], ConsistencyReport] = {}
    for src in ids:
        row: list[float] = []
        for tgt in ids:
            report = propagation_consistency(
                soms[src], soms[tgt], projections[src], projections[tgt]
            )
            reports[(src, tgt)] = report
            row.append(report.value)
        values.append(tuple(row))
    return ConsistencyMatrix(ids, tuple(values), reports)


@dataclass(frozen=True)
class ChainStep:
    """One propagation hop; ``selection=None`` reuses the previous focus."""

    source_map_id: str
    target_map_id: str
    selection: frozenset[int] | None = None


def chain_propagation(
    soms: dict[str, SomMap],
    projections: dict[str, Projection],
    steps: list[ChainStep],
    threshold: float = DEFAULT_FOCUS_THRESHOLD,
) -> list[PropagationResult]:
    """Run propagation steps in order, feeding each focus to the next step.

    A step without an explicit selection activates the previous result's
    focus (target nodes with activity >= ``threshold``).  An empty focus or
    empty selection aborts with an error naming the step.
    """
    if not steps:
        raise ValueError("chain requires at least one step")
    results: list[PropagationResult] = []
    previous: PropagationResult | None = None
    for i, step in enumerate(steps, start=1):
        if step.source_map_id not in soms or step.target_map_id not in soms:
            raise KeyError(f"step {i}: unknown map id")
        if step.selection is not None:
            nodes = step.selection
        else:
            if previous is None:
                raise ValueError(f"step {i}: first step needs an explicit selection")
            if previous.target_map_id != step.source_map_id:
                raise ValueError(
                    f"step {i}: previous focus lives on map "
                    f"{previous.target_map_id!r}, not {step.source_map_id!r}"
                )
            nodes = previous.focus(threshold)
        if not nodes:
            raise ValueError(f"step {i}: empty focus")
        act = activate(soms[step.source_map_id], set(nodes))
        previous = propagate(
            act, projections[step.source_map_id], projections[step.target_map_id]
        )
        results.append(previous)
    return results
