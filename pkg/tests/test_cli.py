import json

import pytest

from mvsom.cli import main
from mvsom.pipeline import load_bundle
from mvsom.service import propagate_payload


@pytest.fixture(scope="module")
def workspace(tmp_path_factory):
    root = tmp_path_factory.mktemp("cli")
    dataset = root / "dataset.json"
    assert main([
        "synth", "--items", "24", "--groups", "4", "--coupling", "1.0",
        "--seed", "2", "--viewpoint", "alpha:8", "--viewpoint", "beta:8",
        "--out", str(dataset),
    ]) == 0
    config = root / "config.json"
    config.write_text(json.dumps({
        "input": {"kind": "dataset", "path": str(dataset)},
        "scan": {"min_side": 2, "max_side": 3},
        "seed": 1,
        "training": {
            "ordering_iterations": 60,
            "tuning_iterations": 120,
            "radius_start": 1.5,
        },
    }))
    bundle_path = root / "bundle.json"
    assert main(["pipeline", "--config", str(config), "--out", str(bundle_path)]) == 0
    return root, dataset, bundle_path


def test_scan_writes_table(workspace, tmp_path):
    root, dataset, _ = workspace
    out = tmp_path / "scan.csv"
    assert main([
        "scan", "--dataset", str(dataset), "--viewpoint", "alpha",
        "--min-side", "2", "--max-side", "3", "--seed", "1", "--out", str(out),
    ]) == 0
    lines = out.read_text().strip().splitlines()
    assert lines[0].startswith("size,clusters")
    assert len(lines) == 3


def test_train_and_zone(workspace, tmp_path):
    root, dataset, _ = workspace
    model = tmp_path / "model.json"
    assert main([
        "train", "--dataset", str(dataset), "--viewpoint", "alpha",
        "--side", "2", "--seed", "1", "--out", str(model),
    ]) == 0
    zones = tmp_path / "zones.json"
    assert main([
        "zone", "--model", str(model), "--dataset", str(dataset),
        "--out", str(zones),
    ]) == 0
    doc = json.loads(zones.read_text())
    assert doc and all("label" in area for area in doc)


def test_consistency_export(workspace, tmp_path):
    _, _, bundle_path = workspace
    out = tmp_path / "matrix.csv"
    assert main(["consistency", "--bundle", str(bundle_path), "--out", str(out)]) == 0
    lines = out.read_text().strip().splitlines()
    assert lines[0] == "source\\target,alpha,beta"
    assert len(lines) == 3


def test_propagate_matches_service_payload(workspace, tmp_path):
    _, _, bundle_path = workspace
    bundle = load_bundle(bundle_path)
    node = bundle.projections["alpha"].non_empty_nodes()[0]
    out = tmp_path / "prop.json"
    assert main([
        "propagate", "--bundle", str(bundle_path), "--source", "alpha",
        "--target", "beta", "--nodes", str(node), "--out", str(out),
    ]) == 0
    body = {"source_map": "alpha", "target_map": "beta",
            "nodes": [node], "theta": 0.1}
    assert json.loads(out.read_text()) == json.loads(
        json.dumps(propagate_payload(bundle, body))
    )


def test_chain_command(workspace, tmp_path):
    _, _, bundle_path = workspace
    bundle = load_bundle(bundle_path)
    node = bundle.projections["alpha"].non_empty_nodes()[0]
    steps = json.dumps([
        {"source_map": "alpha", "target_map": "beta", "nodes": [node]},
        {"source_map": "beta", "target_map": "alpha"},
    ])
    out = tmp_path / "chain.json"
    assert main([
        "chain", "--bundle", str(bundle_path), "--steps", steps,
        "--out", str(out),
    ]) == 0
    doc = json.loads(out.read_text())
    assert len(doc["steps"]) == 2


def test_ingest_converts_triples(workspace, tmp_path):
    root, dataset, _ = workspace
    from mvsom import load_dataset, save_dataset

    ds = load_dataset(dataset)
    triples_dir = tmp_path / "triples"
    save_dataset(ds, triples_dir, format="triples")
    out = tmp_path / "converted.json"
    assert main(["ingest", "--input", str(triples_dir), "--out", str(out)]) == 0
    assert load_dataset(out) == ds


def test_propagate_requires_selection(workspace):
    _, _, bundle_path = workspace
    assert main([
        "propagate", "--bundle", str(bundle_path),
        "--source", "alpha", "--target", "beta",
    ]) == 2
