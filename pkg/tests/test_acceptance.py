"""Acceptance suite: one test per criterion, one printed verdict line each.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the per-criterion
lines.  Criterion 9 is expected to fail: the two-point branch table is
provably non-monotone for some valid parameter sets, the failures do not
carry the uncovered-branch flag, and the suite archives them instead of
hiding them (see the printed payloads).
"""

import json
from fractions import Fraction

import pytest

import riskdist as rd
from riskdist.capacity import exhaustive_support_mask
from riskdist.coupling import triple_projection_map
from riskdist.ensembles import (
    derive_rng,
    drifting_mixture_sequence,
    extremal_pair,
    random_capacity,
    random_capacity_measure,
    random_measure,
    random_two_point_params,
)
from riskdist.measures import evaluate_values, probe_grid, pushforward
from riskdist.metric import lipschitz_control_check, metric_axiom_audit, reverify_failure
from riskdist.oracles import criterion_cross_check, random_probability
from riskdist.space import (
    left_projection_map,
    product_space,
    right_projection_map,
)
from riskdist.twopoint import two_point_eval

from conftest import (
    fixture_spaces,
    make_cycle4,
    make_grid6,
    make_path3,
    make_star5,
    make_two_point,
)

F = Fraction
SPACES = {
    "two-point": make_two_point,
    "path3": make_path3,
    "cycle4": make_cycle4,
    "star5": make_star5,
    "grid6": make_grid6,
}


def verdict(criterion: str, ok: bool, detail: str):
    print(f"[criterion {criterion}] {'PASS' if ok else 'FAIL'}: {detail}")


def ensemble_pool(space, size=12, seed=100):
    rng = derive_rng(seed, f"acceptance-pool-{space.labels}")
    pool = []
    while len(pool) < size:
        mu = random_measure(space, rng)
        if rd.verify_axioms(mu, seed=seed).ok:
            pool.append(mu)
    return pool


def test_criterion_01_point_mass_isometry():
    checked = 0
    for space in fixture_spaces():
        for i in range(space.n):
            for j in range(space.n):
                res = rd.bottleneck_distance(
                    rd.dirac(space, i), rd.dirac(space, j), verify_witness=True
                )
                assert res.value == space.d(i, j)
                assert res.certification == "exact"
                checked += 1
    verdict("01 point-mass isometry", True, f"{checked} pairs across 5 spaces, exact")


def test_criterion_02_feasibility_criterion_cross_check():
    total_additive = total_choquet = 0
    for space, seed in ((make_path3(), 202), (make_cycle4(), 203)):
        report = criterion_cross_check(
            space, additive_instances=100, choquet_instances=100, seed=seed
        )
        assert report.ok, report.disagreements
        total_additive += 100
        total_choquet += 100
    verdict(
        "02 feasibility cross-check",
        True,
        f"{total_additive} additive + {total_choquet} capacity instances, zero disagreements",
    )


def test_criterion_03_bottleneck_transport_agreement():
    pairs = 0
    for make in (make_path3, make_cycle4, make_star5):
        space = make()
        rng = derive_rng(303, f"winf-{space.n}")
        for _ in range(34):
            p = random_probability(space, rng)
            q = random_probability(space, rng)
            res = rd.bottleneck_distance(
                rd.choquet_measure(rd.expectation(space, p.weights)),
                rd.choquet_measure(rd.expectation(space, q.weights)),
            )
            assert res.value == rd.winf_distance(p, q)
            pairs += 1
    assert pairs >= 100
    verdict("03 transport agreement", True, f"{pairs} probability pairs, exact equality")


@pytest.mark.parametrize("name", list(SPACES))
def test_criterion_04_metric_axioms(name):
    space = SPACES[name]()
    report = metric_axiom_audit(space, ensemble_size=100, seed=404)
    for payload in report.discrepancies:
        # sampled-tier discrepancies must re-verify from their payloads
        assert reverify_failure(payload, {"measures": None, "seed": 404}) is not None
    assert report.ok, report.failures
    verdict(
        f"04 metric axioms [{name}]",
        report.ok,
        f"{report.instances} measures, checks {report.checks}, "
        f"{len(report.discrepancies)} archived sampled-tier discrepancies",
    )


def test_criterion_05_diameter():
    for space in fixture_spaces():
        diam = space.diameter()
        lo, hi = extremal_pair(space)
        res = rd.bottleneck_distance(lo, hi, verify_witness=True)
        assert res.value == diam
        pool = ensemble_pool(space, size=8, seed=505)
        for i, a in enumerate(pool):
            for b in pool[i + 1 :]:
                assert rd.bottleneck_distance(a, b, seed=505).value <= diam
    verdict("05 diameter", True, "attained by the min/max pair on every space")


def test_criterion_06_witness_optimality():
    distances = 0
    for space in fixture_spaces():
        pool = ensemble_pool(space, size=10, seed=606)
        for i, a in enumerate(pool):
            for b in pool[i + 1 :]:
                res = rd.bottleneck_distance(a, b, seed=606)
                assert rd.verify_coupling(res.witness, seed=606).ok
                assert res.witness.cost() == res.value
                statuses = [s for _, s, _ in res.ladder]
                assert statuses[-1] == "feasible"
                assert all(s == "infeasible" for s in statuses[:-1])
                distances += 1
    verdict(
        "06 witness optimality",
        True,
        f"{distances} distances: witnesses verify, support max equals value, single switch",
    )


def test_criterion_07_pointwise_gap_control():
    checked = 0
    for space in fixture_spaces():
        pool = ensemble_pool(space, size=8, seed=707)
        for i, a in enumerate(pool):
            for b in pool[i + 1 :]:
                res = rd.bottleneck_distance(a, b, seed=707)
                violations = lipschitz_control_check(a, b, res, seed=707)
                assert violations == []
                checked += 1
    verdict(
        "07 pointwise gap control",
        True,
        f"{checked} pairs, every probe within the modulus bound, exact arithmetic",
    )


def test_criterion_08_gluing():
    space = make_path3()
    prod = product_space(space, space)
    rng = derive_rng(808, "glue-triples")
    probes = probe_grid(prod, 808, 32)
    triples = 0
    while triples < 50:
        mu1 = random_capacity_measure(space, rng)
        mu2 = random_capacity_measure(space, rng)
        mu3 = random_capacity_measure(space, rng)
        m12 = rd.bottleneck_distance(mu1, mu2, seed=808).witness.as_measure()
        m23 = rd.bottleneck_distance(mu2, mu3, seed=808).witness.as_measure()
        glued = rd.glue(m12, m23, space)
        n = space.n
        for phi in probes:
            front = tuple(phi[(q // (n * n)) * n + (q % (n * n)) // n] for q in range(n**3))
            assert evaluate_values(glued, front) == evaluate_values(m12, phi)
            back = tuple(phi[q % (n * n)] for q in range(n**3))
            assert evaluate_values(glued, back) == evaluate_values(m23, phi)
        triples += 1
    verdict(
        "08 gluing",
        True,
        f"{triples} witness triples with shared middles, projection identities exact on the full grid",
    )


def gap_involved(violation, params):
    """True when some function in the violating witness evaluates through
    the uncovered-branch fallback."""
    funcs = []
    wit = violation.witness
    for key in ("lo", "hi"):
        if isinstance(wit.get(key), tuple):
            funcs.append(wit[key])
    if "phi" in wit:
        funcs.append(wit["phi"])
        if "shift" in wit:
            funcs.append(tuple(v + wit["shift"] for v in wit["phi"]))
    if "constant" in wit:
        funcs.append((wit["constant"],) * 2)
    return any(
        two_point_eval(params, values[0], values[1]).gap for values in funcs
    )


def test_criterion_09_two_point_family():
    space = make_two_point()
    rng = derive_rng(909, "family")
    archive = []
    failed_sets = 0
    for index in range(1000):
        params = random_two_point_params(rng)
        mu = rd.two_point_measure(space, params)
        report = rd.verify_axioms(mu, samples=1000, seed=index)
        if report.ok:
            continue
        failed_sets += 1
        for violation in report.violations:
            archive.append(
                {
                    "params": {
                        "alphas": [str(a) for a in params.alphas],
                        "lambdas": [str(l) for l in params.lambdas],
                        "knots": [[str(t), str(y)] for t, y in params.shape.knots],
                    },
                    "axiom": violation.axiom,
                    "gap-involved": gap_involved(violation, params),
                }
            )
    ungated = [entry for entry in archive if not entry["gap-involved"]]
    ok = not ungated
    verdict(
        "09 two-point family",
        ok,
        f"{failed_sets}/1000 parameter sets fail the axioms; "
        f"{len(ungated)}/{len(archive)} violations do NOT involve the uncovered-branch fallback",
    )
    if ungated:
        print("archived counterexamples (first 3):")
        print(json.dumps(ungated[:3], indent=2))
    assert ok, (
        f"{len(ungated)} axiom violations on valid parameter sets are not "
        "attributable to the uncovered-branch fallback; the branch table "
        "itself is non-monotone for finite nonzero shifts with shapes that "
        "do not vanish at the branch boundary (archived above)"
    )


def test_criterion_10_convergence_audit():
    space = make_path3()
    terms, limit = drifting_mixture_sequence(space, 0, 2, count=8)
    report = rd.convergence_audit(terms, limit, seed=1010)
    rows = report.stats["rows"]
    gaps = [r["pointwise-gap"] for r in rows]
    assert all(b < a for a, b in zip(gaps, gaps[1:]))
    diam = space.diameter()
    assert all(r["metric"] == diam for r in rows)
    assert all(r["support-gap"] == diam for r in rows)
    assert report.discrepancies, "the archived instance must be flagged"
    assert not report.failures, "the one-sided gap bound must never break"

    # the bound also holds on a constant and on a limit-reaching sequence
    for extra_terms, extra_limit in (
        ([rd.dirac(space, 1)] * 4, rd.dirac(space, 1)),
        _reaching_sequence(space),
    ):
        extra = rd.convergence_audit(extra_terms, extra_limit, seed=1010)
        assert not extra.failures
    verdict(
        "10 convergence audit",
        True,
        "drift instance flagged (gaps shrink, metric and support gaps stay at the diameter); "
        "gap bound holds on every instance",
    )


def _reaching_sequence(space):
    rng = derive_rng(1011, "reach")
    v0 = random_capacity(space, rng)
    w = random_capacity(space, rng)
    terms = [
        rd.choquet_measure(rd.mix_capacities((1 - eps, eps), (v0, w)))
        for eps in (F(1, 2), F(1, 4), F(1, 8), F(0))
    ]
    return terms, rd.choquet_measure(v0)


def test_criterion_11_support_semantics():
    instances = 0
    for space in (make_path3(), make_cycle4()):
        rng = derive_rng(1101, f"supp-{space.n}")
        target = make_path3()
        for _ in range(25):
            mu = random_measure(space, rng)
            fmap = tuple(rng.randrange(target.n) for _ in range(space.n))
            out = pushforward(fmap, mu, target)
            image = 0
            for i in rd.support(mu, seed=1101).indices():
                image |= 1 << fmap[i]
            assert rd.support(out, seed=1101).mask & ~image == 0
            instances += 1

    # archived strict-inclusion instance: the evaluator reads the corner or
    # the anti-diagonal minimum, its left pushforward is a plain point mass
    two = make_two_point()
    prod = product_space(two, two)
    xi = rd.black_box(prod, lambda chi: max(chi[0], min(chi[1], chi[2])), name="corner")
    assert rd.verify_axioms(xi, seed=11).ok
    pushed = pushforward(left_projection_map(two, two), xi, two)
    support_of_image = rd.support(pushed, seed=11).mask
    image_of_support = 0
    for p in rd.support(xi, seed=11).indices():
        image_of_support |= 1 << (p // 2)
    assert support_of_image == 0b01
    assert image_of_support == 0b11
    assert support_of_image & ~image_of_support == 0
    assert support_of_image != image_of_support

    # capacity-tier supports: the null-point fast path equals the exhaustive
    # subset scan on every fixture space up to six points
    scanned = 0
    for space in fixture_spaces():
        rng = derive_rng(1102, f"fast-{space.n}")
        for _ in range(10):
            cap = random_capacity(space, rng)
            assert cap.support_mask() == exhaustive_support_mask(cap)
            scanned += 1
    verdict(
        "11 support semantics",
        True,
        f"{instances} pushforward inclusions, strict-inclusion instance reproduced, "
        f"{scanned} fast-path supports match exhaustive search",
    )
