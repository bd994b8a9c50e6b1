"""Acceptance criteria, one test and one printed PASS/FAIL line each.

The randomized suite (500 seeded instances, N in {2, 3}, total width <= 10,
every builtin) is drawn once per module and shared.
"""

import json
import os
import subprocess
import sys
import time

import pytest

import oracles
from dfcomp.ambiguity import KnowledgeState, SupportSet, bits_needed
from dfcomp.formats import emit_instance, parse_instance
from dfcomp.functions import BUILTIN_NAMES, FunctionSpec, Problem
from dfcomp.instances import random_suite
from dfcomp.oracle import Oracle
from dfcomp.protocol import greedy_candidates, offline_query_sequence, run_online, run_worst_case
from dfcomp.rates import audit_claims, classify, rate_region
from dfcomp.simulation import batch_simulate, simulate

from conftest import DATA

SUITE_SIZE = 500
SUITE_SEED = 0
TIME_LIMIT = 300.0  # seconds, "about five minutes"
IDENTITY = FunctionSpec.builtin("identity")


def report(capsys, name, ok, detail=""):
    with capsys.disabled():
        print(f"\n[{'PASS' if ok else 'FAIL'}] {name}" + (f": {detail}" if detail else ""))


@pytest.fixture(scope="module")
def suite():
    return random_suite(SUITE_SIZE, SUITE_SEED)


@pytest.fixture(scope="module")
def solved(suite):
    """Exact oracles per instance, built once; ``seconds`` times the sandwich work."""
    start = time.perf_counter()
    out = []
    for c in suite:
        o = Oracle(c.support, c.function)
        od = Oracle(c.support, IDENTITY)
        out.append({
            "oracle": o,
            "cost": o.height(),
            "dsc": od.height(),
            "greedy": run_worst_case(c.support, c.function).total_informant_bits,
        })
    return out, time.perf_counter() - start


def test_counting_identities(capsys, ten_pairs):
    text = "informants 2\nencoding index\nvectors\n" + "".join(
        f"{a} {b}\n" for a, b in [(3, 8), (11, 8), (17, 20), (23, 21), (42, 20), (42, 30)]
    ) + "end\n"
    s = parse_instance(text)
    checks = {
        "bits_needed(10)=4": bits_needed(10) == 4,
        "bits_needed(5)=3": bits_needed(5) == 3,
        "index width 3 for five values": len(s.marginal(1)) == 5 and s.widths[0] == 3,
        "ten-vector example needs 4 bits": bits_needed(len(ten_pairs.vectors)) == 4,
        "five marginal values need 3 bits": all(bits_needed(len(ten_pairs.marginal(i))) == 3 for i in (1, 2)),
    }
    bad = [k for k, v in checks.items() if not v]
    report(capsys, "counting identities", not bad, ", ".join(bad) or f"{len(checks)} exact checks")
    assert not bad


def _constant_cases(suite):
    cases = [(c.support, c.function) for c in suite if len(Problem(c.support, c.function).values) == 1]
    cases.append((SupportSet.from_ints((2, 2), [(0, 3), (3, 0), (1, 2), (2, 1)]), FunctionSpec.builtin("sum")))
    cases.append((SupportSet.from_ints((2, 2, 2), [(0, 0, 0), (1, 1, 0), (3, 0, 3)]), FunctionSpec.builtin("parity")))
    s = SupportSet.from_ints((3, 1), [(5, 0), (2, 1), (7, 1)])
    cases.append((s, FunctionSpec.from_table({v: "c" for v in s.vectors})))
    return cases


def test_zero_bit_case(capsys, suite):
    cases = _constant_cases(suite)
    bad = []
    for k, (s, f) in enumerate(cases):
        greedy = run_worst_case(s, f).total_informant_bits
        exact = Oracle(s, f).min_worst_cost()[0]
        batch = batch_simulate(s, f)
        answers = sum(sum(simulate(s, f, v).informant_bits) for v in s.vectors)
        if (greedy, exact, batch.max_bits, answers) != (0, 0, 0, 0) or not batch.all_correct:
            bad.append(k)
    report(capsys, "zero-bit case", not bad, f"{len(cases)} instances with mu_f = 1, violations {bad}")
    assert not bad


def test_sandwich(capsys, suite, solved):
    results, seconds = solved
    names = {c.function.name for c in suite}
    shape_ok = (
        len(suite) >= 500
        and names == set(BUILTIN_NAMES)
        and {c.support.n_informants for c in suite} <= {2, 3}
        and max(c.support.total_width for c in suite) <= 10
    )
    bad = []
    for c, r in zip(suite, results):
        lower = bits_needed(len(Problem(c.support, c.function).values))
        if not (lower <= r["cost"] <= r["greedy"] <= c.support.total_width and r["cost"] <= r["dsc"]):
            bad.append(c.index)
    ok = shape_ok and not bad and seconds <= TIME_LIMIT
    report(capsys, "hard sandwich", ok,
           f"{len(suite)} instances, violations {len(bad)}, suite shape ok {shape_ok}, {seconds:.1f}s")
    assert shape_ok and not bad
    assert seconds <= TIME_LIMIT


def test_oracle_matches_brute_force(capsys, suite, solved):
    results, _ = solved
    small = [(c, r) for c, r in zip(suite, results) if c.support.total_width <= 6]
    bad = []
    for c, r in small:
        rows = oracles.rows(c.support, c.function)
        value, _ = r["oracle"].min_worst_cost()
        if oracles.exhaustive_min_cost(rows, c.support.total_width) != value:
            bad.append(c.index)
    report(capsys, "oracle equals exhaustive search", bool(small) and not bad,
           f"{len(small)} instances with total width <= 6, mismatches {bad}")
    assert small and not bad


def test_dsc_reduction(capsys, suite):
    states = 0
    bad = []
    for c in suite:
        p = Problem(c.support, IDENTITY)
        for node in offline_query_sequence(c.support, p).nodes():
            if node.is_leaf:
                continue
            states += 1
            k = KnowledgeState(c.support, node.live)
            if greedy_candidates(k, p, "output") != greedy_candidates(k, p, "vectors"):
                bad.append(c.index)
                break
    report(capsys, "source-coding reduction of the greedy rule", not bad,
           f"{states} states, instances with a mismatch {bad}")
    assert not bad


def test_transcript_simulation_equivalence(capsys, suite, solved):
    results, _ = solved
    runs = 0
    bad = []
    for c, r in zip(suite, results):
        s, f = c.support, c.function
        for v in s.vectors:
            runs += 1
            t = run_online(s, f, v)
            log = simulate(s, f, v)
            expected = [m for rd in t.rounds for m in (("query", rd.index, rd.address, None),
                                                       ("answer", rd.index, rd.address, rd.answer))]
            got = [(m.kind, m.round, m.address, m.bit) for m in log.messages if m.kind != "halt"]
            halts = [m for m in log.messages if m.kind == "halt"]
            if got != expected or len(halts) != s.n_informants or log.output != t.output or not log.correct:
                bad.append((c.index, v))
                break
        if batch_simulate(s, f).max_bits != r["greedy"]:
            bad.append((c.index, "batch"))
    report(capsys, "transcript and simulation agree", not bad,
           f"{runs} runs over {len(suite)} instances, mismatches {bad[:5]}")
    assert not bad


def test_rate_region_consistency(capsys, suite, solved):
    results, _ = solved
    pairs = [(c, r) for c, r in zip(suite, results) if c.support.n_informants == 2]
    over, corner_bad, not_tight, dominated = [], [], [], []
    for c, r in pairs:
        o = r["oracle"]
        region = rate_region(c.support, c.function, oracle=o)
        if any(b > region.total for b in region.b):
            over.append(c.index)
        if not all(region.satisfies(x) for x in region.corners):
            corner_bad.append(c.index)
        if not all(sum(x) == region.total for x in region.corners):
            not_tight.append(c.index)
        for t in o.optimal_trees(64):
            if not all(x >= y for x, y in zip(t.profile(2), region.b)):
                dominated.append(c.index)
                break
    ok = not (over or corner_bad or not_tight or dominated)
    first = not_tight[0] if not_tight else None
    detail = (f"{len(pairs)} two-informant instances; b_i > #f: {len(over)}, corner outside region: "
              f"{len(corner_bad)}, sum constraint not tight at a corner: {len(not_tight)}"
              f" (first: instance {first}), profile below b: {len(dominated)}")
    report(capsys, "rate-region consistency", ok, detail)
    assert not over and not corner_bad and not dominated
    assert not not_tight, "b_1 + b_2 > #f on some instances, so no corner can make the sum constraint tight"


def test_claims_audit(capsys, suite, tmp_path_factory):
    cases = [(c.support, c.function) for c in suite]
    rep = audit_claims(cases)
    path = tmp_path_factory.mktemp("audit") / "claims.json"
    path.write_text(json.dumps(rep, indent=2) + "\n")
    back = json.loads(path.read_text())
    wanted = {"loose-upper", "tight-interval", "lemma4-equal-width", "lemma4-narrower",
              "corner-achievability", "greedy-optimality", "property-2", "property-3",
              "property-4", "property-5"}
    verbatim = True
    for name, claim in back["claims"].items():
        for failure in claim["failures"]:
            if "instance" in failure:
                verbatim &= emit_instance(suite[failure["index"]].support) == failure["instance"]
            else:
                verbatim &= "first" in failure and "second" in failure
    ok = (wanted <= set(back["claims"]) and back["instances"] == len(suite) and verbatim
          and back["summary"]["lemma4-narrower"]["violations"] == 0)
    counts = ", ".join(f"{k} {v['violations']}/{v['checked']}" for k, v in back["summary"].items())
    report(capsys, "claims audit", ok, counts)
    assert ok


def test_classification(capsys, suite):
    lossy_names = ["bitwise-or", "bitwise-and", "bitwise-xor", "max", "min", "parity"]
    bad = []
    checked = 0
    for c in suite:
        s = c.support
        if classify(s, IDENTITY).label != "Lossless":
            bad.append((c.index, "identity"))
        for name in lossy_names + [c.function.name]:
            label = classify(s, FunctionSpec.builtin(name))
            checked += 1
            if (label.label == "Lossless") != (label.mu_f == label.mu_domain):
                bad.append((c.index, name))
            if name in lossy_names and label.mu_f < label.mu_domain and label.label != "Lossy":
                bad.append((c.index, name))
    report(capsys, "lossy/lossless classification", not bad, f"{checked} labels, violations {bad[:5]}")
    assert not bad


def _cli_commands(tmp):
    e1 = tmp / "e1.txt"
    e1.write_text("informants 2\nwidths 1 1\nvectors\n0 0\n0 1\n1 0\nend\n")
    gen = str(DATA / "gen_3_3_0.15_7.txt")
    table = tmp / "table.txt"
    table.write_text("function table\n0 0 -> a\n0 1 -> b\n1 0 -> a\nend\n")
    e1 = str(e1)
    return [
        ["ambiguity", gen, "--function", "or"],
        ["ambiguity", e1, "--format", "text"],
        ["run", gen, "--function", "or", "--drawn", "000 011"],
        ["run", gen, "--function", "max", "--worst-case"],
        ["run", gen, "--function", "sum", "--worst-case", "--simulate"],
        ["run", gen, "--function", "or", "--drawn", "001 010", "--simulate", "--tie", "random:9"],
        ["optimal", gen, "--function", "xor"],
        ["optimal", e1, "--function-file", str(table)],
        ["rate-region", gen, "--function", "or"],
        ["rate-region", gen, "--csv"],
        ["bounds", gen, "--function", "min"],
        ["bounds", e1, "--function", "or", "--format", "text"],
        ["classify", gen, "--function", "parity", "--format", "text"],
        ["classify", e1],
        ["gen", "--widths", "3,3", "--density", "0.15", "--seed", "7"],
        ["gen", "--widths", "2,2,3", "--density", "0.3", "--seed", "12"],
        ["audit", "--count", "8", "--seed", "3", "--max-width", "6"],
        ["audit", "--lemma4", "--count", "6", "--seed", "1", "--max-width", "6"],
        ["audit", "--properties", "--count", "8", "--seed", "2", "--max-width", "6"],
        ["audit", "--theorem1", gen, e1, "--function", "or"],
    ]


def test_cli_determinism(capsys, tmp_path):
    cmds = _cli_commands(tmp_path)
    bad = []
    for cmd in cmds:
        outs = []
        for hash_seed in ("1", "2"):
            env = dict(os.environ, PYTHONHASHSEED=hash_seed)
            res = subprocess.run([sys.executable, "-m", "dfcomp", *cmd], capture_output=True, env=env)
            outs.append((res.returncode, res.stdout))
        if outs[0] != outs[1] or outs[0][0] != 0:
            bad.append(" ".join(cmd))
    report(capsys, "CLI determinism", len(cmds) == 20 and not bad,
           f"{len(cmds)} commands run twice under different hash seeds, differing or failing: {bad}")
    assert len(cmds) == 20 and not bad
