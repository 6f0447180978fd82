"""Acceptance suite: one test per criterion, each printing a pass line.

Run with `pytest tests/test_acceptance.py -v -s` to see the per-criterion
lines. Tolerances and instance counts are fixed here, not tunable.
"""

import hashlib
import json
import time
from concurrent.futures import ThreadPoolExecutor

import numpy as np
import pytest
from fastapi.testclient import TestClient

from blendplan import (
    DemandVector,
    StockVector,
    component_requirements,
    enumerate_variants,
    export_variants,
    max_quantities,
    open_session,
    parse_recipes_csv,
    plan,
    render_step_report,
    session_choose,
    stock_state,
    validate_recipes,
    write_recipes_csv,
)
from blendplan.ingestion import StockSource
from blendplan.model import ValidationError
from blendplan.reporting import json_bytes
from blendplan.service import ServiceConfig, create_app, plan_view, session_view, variants_view
from oracles import (
    brute_force_caps,
    feasible_random_demand,
    fig_style_caps,
    naive_enumerate,
    naive_requirements,
    random_recipes,
    random_stock,
)
from report_grammar import check_report_grammar, parse_report_text


def make_recipes(weights):
    n, m = np.asarray(weights).shape
    return validate_recipes([f"P{i}" for i in range(n)], [f"C{j}" for j in range(m)], weights)


def worked_instance():
    recipes = validate_recipes(
        ["BLEND1", "BLEND2"], ["C1", "C2", "C3"], [[0.5, 0.5, 0.0], [0.2, 0.3, 0.5]]
    )
    return recipes, StockVector(np.array([10.0, 9.0, 5.0])), DemandVector(np.array([4.0, 2.0]))


def test_criterion_1_requirements_oracle_equivalence():
    rng = np.random.default_rng(1001)
    cases = []
    for _ in range(1000):
        n, m = int(rng.integers(1, 6)), int(rng.integers(1, 9))
        weights = random_recipes(rng, n, m)
        cases.append((make_recipes(weights), rng.uniform(0.0, 40.0, n)))
    start = time.perf_counter()
    for recipes, demand in cases:
        result = component_requirements(recipes, DemandVector(demand)).values
        expected = naive_requirements(recipes.weights, demand)
        assert np.allclose(result, expected, atol=1e-9, rtol=0.0)
    elapsed = time.perf_counter() - start
    assert elapsed < 1.0, f"criterion 1 runtime {elapsed:.3f}s exceeds 1 s"
    print(f"\nPASS criterion 1: requirements match diag-product oracle to 1e-9 on 1000 instances ({elapsed:.3f}s)")


def test_criterion_2_capacity_oracle_and_transcription():
    rng = np.random.default_rng(1002)
    cases = []
    for _ in range(1000):
        n, m = int(rng.integers(1, 6)), int(rng.integers(1, 9))
        weights = random_recipes(rng, n, m)
        cases.append((make_recipes(weights), random_stock(rng, m, scale=20.0)))
    start = time.perf_counter()
    for recipes, stock in cases:
        caps = max_quantities(recipes, StockVector(stock)).quantities.tolist()
        assert caps == brute_force_caps(recipes.weights, stock)
        assert caps == fig_style_caps(recipes.weights, stock)
    elapsed = time.perf_counter() - start
    assert elapsed < 5.0, f"criterion 2 runtime {elapsed:.3f}s exceeds 5 s"
    print(f"\nPASS criterion 2: capacities match increment oracle and floor-loop transcription on 1000 instances ({elapsed:.3f}s)")


def test_criterion_3_shortfall_correctness():
    rng = np.random.default_rng(1003)
    for _ in range(500):
        n, m = int(rng.integers(1, 6)), int(rng.integers(1, 9))
        recipes = make_recipes(random_recipes(rng, n, m))
        stock = StockVector(random_stock(rng, m, scale=15.0))
        demand = DemandVector(rng.uniform(0.0, 25.0, n))
        state = stock_state(component_requirements(recipes, demand), stock)
        short = state.remaining < -1e-9
        assert state.negative == bool(short.any())
        expected_required = np.where(short, state.used - stock.quantities, 0.0)
        assert np.allclose(state.required, expected_required, atol=1e-12)
        assert (state.required[~short] == 0).all()
    recipes, stock, _ = worked_instance()
    state = stock_state(component_requirements(recipes, DemandVector(np.array([25.0, 15.0]))), stock)
    assert state.negative
    assert np.allclose(state.required, [5.5, 8.0, 2.5], atol=1e-12)
    print("\nPASS criterion 3: shortfall flag and required tonnage correct on 500 instances plus the derived case")


def _criterion_4_exports(seed: int) -> tuple[bytes, float]:
    rng = np.random.default_rng(seed)
    exports = hashlib.sha256()
    start = time.perf_counter()
    for _ in range(500):
        n, m = int(rng.integers(1, 5)), int(rng.integers(1, 7))
        weights = random_recipes(rng, n, m)
        recipes = make_recipes(weights)
        stock = random_stock(rng, m, scale=50.0)
        demand = feasible_random_demand(rng, weights, stock)
        outcome = plan(recipes, StockVector(stock), DemandVector(demand))
        assert outcome.feasible
        variants = enumerate_variants(outcome.tree)

        got = {tuple(int(x) for x in v.extras) for v in variants}
        assert len(got) == len(variants), "duplicate totals survived dedup"
        post_demand = np.maximum(outcome.tree.state.remaining, 0.0)
        assert got == naive_enumerate(weights, post_demand)

        for variant in variants:
            usage = np.asarray(naive_requirements(weights, variant.totals)).sum(axis=0)
            assert (usage <= stock + 1e-9).all(), "variant infeasible"
            for i in range(n):
                bumped = variant.totals.copy()
                bumped[i] += 1
                usage = np.asarray(naive_requirements(weights, bumped)).sum(axis=0)
                assert (usage > stock + 1e-9).any(), "variant not locally maximal"

        exports.update(export_variants(variants, recipes.product_names, "csv"))
        exports.update(export_variants(variants, recipes.product_names, "json"))
    return exports.digest(), time.perf_counter() - start


def test_criterion_4_enumeration_oracle():
    _, elapsed = _criterion_4_exports(1004)
    assert elapsed < 30.0, f"criterion 4 runtime {elapsed:.3f}s exceeds 30 s"
    print(f"\nPASS criterion 4: enumeration matches naive recursive oracle on 500 instances, all variants feasible and locally maximal ({elapsed:.3f}s)")


def test_criterion_5_worked_instance():
    recipes, stock, demand = worked_instance()
    outcome = plan(recipes, stock, demand)
    assert outcome.feasible
    assert outcome.tree.root.caps.tolist() == [12, 8]
    variants = enumerate_variants(outcome.tree)
    totals = sorted(v.totals.tolist() for v in variants)
    assert totals == [[12.0, 10.0], [16.0, 3.0]]
    oracle = naive_enumerate(recipes.weights, np.maximum(outcome.tree.state.remaining, 0.0))
    assert {tuple(int(x) for x in v.extras) for v in variants} == oracle
    print("\nPASS criterion 5: worked instance yields variants {[16,3],[12,10]} with root choices [12,8]")


def test_criterion_6_step_report_grammar():
    # crafted instance with an all-positive root and a nested branch
    recipes = validate_recipes(
        ["BLEND1", "BLEND2", "BLEND3"],
        ["C1", "C2", "C3"],
        [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.5, 0.5]],
    )
    outcome = plan(recipes, StockVector(np.array([2.0, 3.0, 4.0])), DemandVector(np.array([1.0, 1.0, 1.0])))
    assert (outcome.tree.root.caps > 0).all(), "instance must have an all-positive root"
    report = render_step_report(outcome.tree)
    rows = parse_report_text(report.to_text(), 3)
    facts = check_report_grammar(rows)
    assert facts["saw_choices"], "missing Possible choices rows"
    assert facts["saw_dotted"], "missing dotted sub-step labels like 1.1"
    assert facts["leaves"] >= 2

    # random 3-product instances with all-positive roots follow the same grammar
    rng = np.random.default_rng(1006)
    checked = 0
    while checked < 50:
        weights = random_recipes(rng, 3, int(rng.integers(2, 6)))
        recipes_i = make_recipes(weights)
        stock = random_stock(rng, recipes_i.m, scale=25.0)
        outcome = plan(recipes_i, StockVector(stock), DemandVector(np.zeros(3)))
        if not outcome.feasible or not (outcome.tree.root.caps > 0).all():
            continue
        check_report_grammar(parse_report_text(render_step_report(outcome.tree).to_text(), 3))
        checked += 1
    print("\nPASS criterion 6: step reports follow the iteration-table row grammar (sub-steps, choices rows, zero row)")


def test_criterion_7_csv_round_trip_and_error_codes():
    rng = np.random.default_rng(1007)
    for _ in range(200):
        n, m = int(rng.integers(1, 6)), int(rng.integers(1, 8))
        weights = random_recipes(rng, n, m)
        named = bool(rng.integers(0, 2))
        components = [f"ING{j}" for j in range(m)] if named else [f"C{j + 1}" for j in range(m)]
        recipes = validate_recipes([f"P{i}" for i in range(n)], components, weights)
        again = parse_recipes_csv(write_recipes_csv(recipes))
        assert again.product_names == recipes.product_names
        assert again.component_names == recipes.component_names
        assert np.array_equal(again.weights, recipes.weights)

    malformed = {
        "BLEND1,0.5,abc": "PARSE",
        "A,0.5,0.5\nB,1.0": "RAGGED_ROWS",
        "A,0.5,0.4": "ROW_SUM",
        "A,1.5,-0.5": "NEGATIVE_WEIGHT",
        "A,0,0\nB,1,0": "ZERO_ROW",
        "A,1,0\nA,0,1": "DUPLICATE_NAME",
        "A,nan,1": "NON_FINITE",
    }
    for text, code in malformed.items():
        with pytest.raises(ValidationError) as excinfo:
            parse_recipes_csv(text)
        assert code in {issue.code for issue in excinfo.value.issues}, f"{text!r} should raise {code}"
    print("\nPASS criterion 7: CSV round-trip identity on 200 matrices; malformed inputs raise the specified codes")


def test_criterion_8_service_parity_and_concurrency():
    recipes, stock, demand = worked_instance()
    config = ServiceConfig(stock_source=StockSource("inline", "10,9,5"))
    app = create_app(recipes, config)
    with TestClient(app) as client:
        resp = client.post("/plan", json={"demand": [4, 2]})
        outcome = plan(recipes, stock, demand)
        assert resp.content == json_bytes(plan_view(recipes, outcome))

        resp = client.post("/plan", json={"demand": [25, 15]})
        infeasible = plan(recipes, stock, DemandVector(np.array([25.0, 15.0])))
        assert resp.content == json_bytes(plan_view(recipes, infeasible))

        resp = client.post("/variants", json={"demand": [4, 2]})
        variants = enumerate_variants(outcome.tree)
        assert resp.content == json_bytes(variants_view(recipes, variants))

        resp = client.post("/sessions", json={"demand": [4, 2]})
        sid = resp.json()["id"]
        mirror = open_session(recipes, stock, demand, session_id=sid)
        assert resp.content == json_bytes(session_view(mirror))
        resp = client.post(f"/sessions/{sid}/choose", json={"option": 1})
        session_choose(mirror, 1)
        assert resp.content == json_bytes(session_view(mirror))

        for _ in range(100):
            sid = client.post("/sessions", json={"demand": [4, 2]}).json()["id"]
            with ThreadPoolExecutor(max_workers=2) as pool:
                results = [
                    f.result()
                    for f in [
                        pool.submit(client.post, f"/sessions/{sid}/choose", json={"option": 1}),
                        pool.submit(client.post, f"/sessions/{sid}/choose", json={"option": 2}),
                    ]
                ]
            assert sorted(r.status_code for r in results) == [200, 409]
            stored = app.state.store.acquire(sid)[0]
            assert stored.step == 1 and stored.finished
    print("\nPASS criterion 8: service responses byte-identical to library calls; 100 concurrent-choose rounds kept step counters intact")


def test_criterion_9_determinism():
    digest_a, _ = _criterion_4_exports(1004)
    digest_b, _ = _criterion_4_exports(1004)
    assert digest_a == digest_b, "criterion 4 exports differ between runs"

    recipes, stock, demand = worked_instance()
    snapshots = []
    for _ in range(2):
        outcome = plan(recipes, stock, demand)
        variants = enumerate_variants(outcome.tree)
        snapshots.append(
            (
                export_variants(variants, recipes.product_names, "csv"),
                export_variants(variants, recipes.product_names, "json"),
            )
        )
    assert snapshots[0] == snapshots[1]
    assert snapshots[0][0] == b"variant,BLEND1,BLEND2\n1,12,10\n2,16,3\n"
    print("\nPASS criterion 9: two full enumeration runs produce byte-identical variant exports")
