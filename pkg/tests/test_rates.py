import json
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dfcomp.ambiguity import SupportSet
from dfcomp.errors import InvalidArgumentError
from dfcomp.functions import BUILTIN_NAMES, FunctionSpec
from dfcomp.oracle import Oracle
from dfcomp.protocol import run_online
from dfcomp.rates import (
    BoundsReport,
    ClassLabel,
    RateRegion,
    audit_claims,
    audit_lemma4,
    audit_properties,
    audit_theorem1,
    classify,
    loose_bounds,
    pair_by_function,
    rate_region,
    tight_bounds,
)

from test_ambiguity import supports

SAFE = [n for n in BUILTIN_NAMES if n != "iterated-exponentiation"]
OR = FunctionSpec.builtin("or")
IDENTITY = FunctionSpec.builtin("identity")


def test_region_e1_or(e1):
    r = rate_region(e1, OR)
    assert r.total == 2 and r.b == [1, 1]
    assert r.corners == [[1, 1], [1, 1]]
    assert r.sum_tight and all(r.corner_achievable)
    assert r.satisfies([1, 1]) and not r.satisfies([0, 2]) and not r.satisfies([1, 0])


def test_region_e2_identity(e2):
    r = rate_region(e2, IDENTITY)
    assert r.total == 1 and r.b == [0, 0]
    assert r.corners == [[0, 1], [1, 0]]
    assert r.pareto == [[0, 1], [1, 0]]
    assert all(r.corner_enumerated)


def test_region_where_minima_overshoot_the_sum():
    # every depth-2 tree must start with x2[2]; b = (1, 2) while #f = 2
    s = SupportSet(
        (1, 2), (("0", "00"), ("0", "01"), ("0", "10"), ("1", "01"))
    )
    r = rate_region(s, IDENTITY)
    assert r.total == 2 and r.b == [1, 2]
    assert not r.sum_tight
    assert r.corners == [[1, 2], [1, 2]]
    assert r.pareto == [[1, 2]]


def test_region_round_trip(e1):
    r = rate_region(e1, OR)
    assert RateRegion.from_dict(json.loads(json.dumps(r.to_dict()))) == r


def test_region_three_informants():
    s = SupportSet.from_ints((1, 1, 1), [(0, 0, 0), (0, 1, 1), (1, 0, 1), (1, 1, 0)])
    r = rate_region(s, IDENTITY)
    assert r.beyond_two and r.corners == []
    assert len(r.constraints) == 4


def test_tight_bounds_e1_or(e1):
    rep = tight_bounds(e1, OR)
    assert rep.epsilons == pytest.approx([0.415037499279, 0.0])
    assert Fraction(rep.threshold) == 2
    assert rep.branch == "large-residual"
    assert (rep.tight_lower, rep.tight_upper) == (1, 2)
    assert rep.measured == 2 and rep.tight_holds
    assert BoundsReport.from_dict(rep.to_dict()).measured == 2


def test_tight_bounds_solved():
    s = SupportSet.from_ints((2, 2), [(0, 3), (3, 0), (1, 2)])
    rep = tight_bounds(s, FunctionSpec.builtin("sum"))
    assert rep.branch == "solved" and (rep.tight_lower, rep.tight_upper) == (0, 0) and rep.measured == 0


def test_tight_bounds_rejects_online_transcript(e1):
    t = run_online(e1, OR, ("0", "0"))
    with pytest.raises(InvalidArgumentError):
        tight_bounds(e1, OR, t)


def test_loose_bounds_example(e1):
    lb = loose_bounds(e1, OR)
    assert (lb.lower, lb.dsc, lb.mu_s_min, lb.upper_raw) == (1, 2, 1, 2)
    assert lb.lower_holds and lb.upper_holds


def test_classify(e1, e2, ten_pairs):
    assert classify(e1, IDENTITY) == ClassLabel("Lossless", 3, 3)
    assert classify(e1, OR).label == "Lossy"
    assert classify(ten_pairs, OR) == ClassLabel("Lossy", 5, 10)
    assert ClassLabel.from_dict(classify(e2, OR).to_dict()) == classify(e2, OR)


@settings(max_examples=60, deadline=None)
@given(supports(max_n=3, max_w=3), st.sampled_from(SAFE))
def test_classification_matches_counts(s, name):
    f = FunctionSpec.builtin(name)
    c = classify(s, f)
    assert c.mu_f <= c.mu_domain
    assert (c.label == "Lossless") == (c.mu_f == c.mu_domain)
    if name == "identity":
        assert c.label == "Lossless"


@settings(max_examples=40, deadline=None)
@given(supports(max_n=2, max_w=3), st.sampled_from(SAFE))
def test_region_hard_facts(s, name):
    f = FunctionSpec.builtin(name)
    o = Oracle(s, f)
    r = rate_region(s, f, oracle=o)
    assert all(bi <= r.total for bi in r.b)
    assert all(u <= bi for u, bi in zip(r.b_unrestricted, r.b))
    for c in r.corners:
        assert r.satisfies(c)
    assert r.sum_tight == (sum(r.b) <= r.total)
    if r.sum_tight:
        assert all(sum(c) == r.total for c in r.corners)
    for t in o.optimal_trees(64):
        assert all(x >= y for x, y in zip(t.profile(2), r.b))


@settings(max_examples=40, deadline=None)
@given(supports(max_n=3, max_w=3), st.sampled_from(SAFE))
def test_bounds_are_consistent(s, name):
    f = FunctionSpec.builtin(name)
    rep = tight_bounds(s, f)
    assert rep.lower_loose <= rep.measured <= rep.dsc
    assert rep.measured <= rep.greedy
    assert rep.upper_loose >= rep.lower_loose
    assert rep.tight_lower <= rep.tight_upper


def test_lemma4_audit(e1, e2):
    rep = audit_lemma4([(e1, IDENTITY), (e1, OR), (e2, OR)])
    assert rep["checked"] == 3 and rep["narrower_failures"] == []
    cases = {r["index"]: r["case"] for r in rep["rows"]}
    assert cases == {0: "equal-width", 1: "narrower", 2: "equal-width"}


def test_property_pairs():
    # same vector count, fewer outputs: the lower-mu_f instance should not cost more
    s = SupportSet.from_ints((2, 2), [(0, 0), (1, 1), (2, 2), (3, 3)])
    t = SupportSet.from_ints((2, 2), [(0, 0), (0, 1), (1, 0), (1, 1)])
    rep = audit_properties([((t, OR), (s, OR))])
    row = rep["rows"][0]
    assert row["mu_dsc"] == [4, 4] and row["property"] == 3
    assert row["cost_f"] == [2, 2] and row["holds"] is True
    with pytest.raises(InvalidArgumentError):
        audit_properties([((s, OR), (t, IDENTITY))])


def test_pair_by_function(e1, e2, ten_pairs):
    pairs = pair_by_function([(e1, OR), (e2, IDENTITY), (ten_pairs, OR), (e1, IDENTITY)])
    assert pairs == [((e1, OR), (ten_pairs, OR)), ((e2, IDENTITY), (e1, IDENTITY))]


def test_theorem1_audit_reports_gaps():
    s = SupportSet((1, 2), (("0", "00"), ("0", "01"), ("0", "10"), ("1", "01")))
    rep = audit_theorem1([(s, IDENTITY)])
    row = rep["rows"][0]
    assert row["gap"] == row["greedy"] - row["exact"] >= 0


def test_audit_claims_shape(e1, e2, ten_pairs):
    rep = audit_claims([(e1, OR), (e2, IDENTITY), (ten_pairs, OR), (e1, IDENTITY)])
    assert rep["instances"] == 4
    assert set(rep["claims"]) >= {
        "loose-upper", "tight-interval", "lemma4-equal-width", "lemma4-narrower",
        "corner-achievability", "greedy-optimality",
        "property-1", "property-2", "property-3", "property-4", "property-5",
    }
    assert rep["summary"]["lemma4-narrower"]["violations"] == 0
    for claim in rep["claims"].values():
        for failure in claim["failures"]:
            assert "instance" in failure or "first" in failure
    json.dumps(rep)
