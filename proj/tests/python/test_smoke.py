"""Python binding smoke tests: solver goldens, fixtures, and schema checks."""
import json
import math
import os

import pytest

import sepnet


def h2(p):
    return -p * math.log2(p) - (1 - p) * math.log2(1 - p)


def fixture(name):
    return os.path.join(os.environ.get("SEPNET_FIXTURES", "fixtures"), name)


def test_capacity_golden():
    r = sepnet.channel_capacity(sepnet.Dmc.bsc(0.11))
    assert r.converged
    assert abs(r.value - (1 - h2(0.11))) < 1e-6
    assert r.lower_bound <= r.value <= r.upper_bound + 1e-12


def test_rate_distortion_curve():
    u = sepnet.Pmf.uniform(2)
    d = sepnet.DistortionMeasure.hamming(2)
    for D in (0.05, 0.11, 0.25, 0.4):
        r = sepnet.rate_distortion(u, d, D)
        assert abs(r.value - (1 - h2(D))) < 1e-4


def test_network_fixture_loads():
    spec = sepnet.NetworkSpec.from_json(open(fixture("fig2.json")).read())
    spec.validate()
    caps = sepnet.edge_capacities(spec)
    assert len(caps) == 3
    for c in caps:
        assert abs(c - (1 - h2(0.05))) < 1e-6


def test_genie_closed_form():
    dm = sepnet.DistortionMatrix(3, 4)
    raw = json.load(open(fixture("fig7_distortions.json")))
    for i in range(3):
        for j in range(4):
            dm.set(i + 1, j + 1, raw["d"][i * 4 + j])
    spec_raw = json.load(open(fixture("fig7.json")))
    demands = {int(k): set(v) for k, v in spec_raw["demands"].items()}
    orders = sepnet.induce_orders(dm, demands)
    rm = sepnet.quadratic_genie_rate_matrix(dm, orders)
    defined = [v for v in rm.r if v != -1.0]
    assert defined == [0.5, 0.5]
    assert sepnet.aggregate_throughput(rm, orders) == pytest.approx(1.5)


def test_seeded_simulation_reproducible():
    r1 = sepnet.channel_simulation_experiment(
        sepnet.Dmc.bsc(0.1), sepnet.Pmf.uniform(2), 150, 0.05, 0.1, 4,
        sepnet.SeededRng(11, 0))
    r2 = sepnet.channel_simulation_experiment(
        sepnet.Dmc.bsc(0.1), sepnet.Pmf.uniform(2), 150, 0.05, 0.1, 4,
        sepnet.SeededRng(11, 0))
    assert r1.to_csv() == r2.to_csv()
    assert json.loads(r1.to_json())["trials"] == 4


def test_fixture_schemas():
    jsonschema = pytest.importorskip("jsonschema")
    schemas = os.environ.get("SEPNET_SCHEMAS", "schemas")
    pairs = [
        ("fig2.json", "network.schema.json"),
        ("fig4.json", "network.schema.json"),
        ("fig5.json", "network.schema.json"),
        ("fig7.json", "network.schema.json"),
        ("bsc011.json", "dmc.schema.json"),
        ("fig4_region.json", "polytope.schema.json"),
        ("fig7_distortions.json", "distortion_matrix.schema.json"),
        ("base_identity_fig2.json", "base_code.schema.json"),
        ("base_map_fig2.json", "base_code.schema.json"),
        ("base_majority_rep3.json", "base_code.schema.json"),
    ]
    # cross-file $refs resolve against a registry of every shipped schema
    from referencing import Registry, Resource

    resources = []
    for name in os.listdir(schemas):
        if name.endswith(".schema.json"):
            doc = json.load(open(os.path.join(schemas, name)))
            resources.append((name, Resource.from_contents(doc)))
    registry = Registry().with_resources(resources)
    for doc, schema in pairs:
        validator = jsonschema.Draft202012Validator(
            json.load(open(os.path.join(schemas, schema))), registry=registry)
        validator.validate(json.load(open(fixture(doc))))


def test_worst_noise_binary():
    g = sepnet.FiniteAbelianGroup.make_cyclic(2)
    s = sepnet.AdditiveStructure.from_group(g, [0.0, 1.0])
    r = sepnet.worst_noise_capacity(s, 0.2)
    expect = h2(0.2 + 0.2 - 2 * 0.2 * 0.2) - h2(0.2)
    assert abs(r.value - expect) < 1e-4
