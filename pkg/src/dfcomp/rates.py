"""Rate regions, performance bounds, lossy/lossless classes and claim audits.

Two kinds of checks live here. Hard facts (provable, e.g. #_f <= #_DSC)
raise ``HardAssertionError`` when violated. Claimed bounds and orderings
that have no proof are only evaluated and reported, with the offending
instances attached.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .ambiguity import SupportSet, bits_needed
from .errors import HardAssertionError, InvalidArgumentError
from .functions import FunctionSpec, Problem
from .oracle import DEFAULT_BUDGET, Oracle, SearchBudget
from .protocol import LOWEST, TieRule, Transcript, run_worst_case

IDENTITY = FunctionSpec.builtin("identity")


def _ceil_log2(x: Fraction | int) -> int:
    x = Fraction(x)
    if x <= 1:
        return 0
    return bits_needed(-(-x.numerator // x.denominator))


def _fraction_str(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def _eps(x: float) -> float:
    return float(f"{x:.12g}")


# -- rate region --------------------------------------------------------------


@dataclass
class RateRegion:
    """Worst-case achievable rates ``{R_i >= b_i, sum R_i >= total}``.

    ``corners`` are the vertices of that polytope (N = 2 only).  The sum
    constraint passes through them only when ``sum(b) <= total``;
    ``sum_tight`` records whether it does.
    """

    n_informants: int
    total: int
    b: list[int]
    b_unrestricted: list[int]
    corners: list[list[int]] = field(default_factory=list)
    sum_tight: bool = True
    pareto: list[list[int]] = field(default_factory=list)
    corner_achievable: list[bool] = field(default_factory=list)
    corner_enumerated: list[bool] = field(default_factory=list)
    beyond_two: bool = False

    @property
    def constraints(self) -> list[dict]:
        n = self.n_informants
        rows = [
            {"coefficients": [int(k == i) for k in range(n)], "rhs": self.b[i], "label": f"R{i + 1} >= b{i + 1}"}
            for i in range(n)
        ]
        rows.append({"coefficients": [1] * n, "rhs": self.total, "label": "sum R >= #f"})
        return rows

    def satisfies(self, point: Sequence[int]) -> bool:
        return all(sum(c * x for c, x in zip(row["coefficients"], point)) >= row["rhs"] for row in self.constraints)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["constraints"] = self.constraints
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "RateRegion":
        d = {k: v for k, v in d.items() if k != "constraints"}
        return cls(**d)


def rate_region(
    s: SupportSet,
    f: FunctionSpec,
    enumerate_limit: int = 64,
    budget: SearchBudget = DEFAULT_BUDGET,
    oracle: Oracle | None = None,
) -> RateRegion:
    o = oracle or Oracle(s, f, budget)
    n = s.n_informants
    total = o.height()
    b = [o.informant_cost(i, total) for i in range(1, n + 1)]
    b_free = [o.informant_cost(i) for i in range(1, n + 1)]
    pareto = [list(p) for p in o.pareto_profiles(total)]
    region = RateRegion(n, total, b, b_free, pareto=pareto, beyond_two=n > 2)
    region.sum_tight = sum(b) <= total
    if n == 2:
        region.corners = [[b[0], max(total - b[0], b[1])], [max(total - b[1], b[0]), b[1]]]
        profiles = [t.profile(n) for t in o.optimal_trees(enumerate_limit)]
        for c in region.corners:
            region.corner_achievable.append(any(all(x <= y for x, y in zip(p, c)) for p in pareto))
            region.corner_enumerated.append(any(all(x <= y for x, y in zip(p, c)) for p in profiles))
    _check_region(region)
    return region


def _check_region(r: RateRegion) -> None:
    problems = []
    if any(bi > r.total for bi in r.b):
        problems.append(f"b {r.b} exceeds #f {r.total}")
    if any(u > bi for u, bi in zip(r.b_unrestricted, r.b)):
        problems.append(f"unrestricted b {r.b_unrestricted} exceeds depth-budgeted b {r.b}")
    for p in r.pareto:
        if sum(p) < r.total or any(x < u for x, u in zip(p, r.b_unrestricted)):
            problems.append(f"optimal-tree profile {p} escapes the region")
    for c in r.corners:
        if not r.satisfies(c):
            problems.append(f"corner {c} violates the constraints")
    if problems:
        raise HardAssertionError("; ".join(problems))


# -- bounds -------------------------------------------------------------------


@dataclass
class LooseBounds:
    lower: int
    upper: int
    upper_raw: int
    measured: int
    dsc: int
    mu_s_min: int

    @property
    def lower_holds(self) -> bool:
        return self.lower <= self.measured

    @property
    def upper_holds(self) -> bool:
        return self.measured <= self.upper_raw


def loose_bounds(
    s: SupportSet,
    f: FunctionSpec,
    budget: SearchBudget = DEFAULT_BUDGET,
    oracle: Oracle | None = None,
    dsc_oracle: Oracle | None = None,
) -> LooseBounds:
    """Output-count lower bound and the #_DSC - ceil(log2 mu_s_min) upper bound."""
    o = oracle or Oracle(s, f, budget)
    od = dsc_oracle or Oracle(s, IDENTITY, budget)
    p = o.problem
    mult = [m.bit_count() for m in p.output_masks]
    lower = bits_needed(len(mult))
    dsc = od.height()
    raw = dsc - bits_needed(min(mult))
    lb = LooseBounds(lower, max(raw, lower), raw, o.height(), dsc, min(mult))
    if not lb.lower_holds:
        raise HardAssertionError(f"#f = {lb.measured} is below ceil(log2 mu_f) = {lower}")
    if lb.measured > dsc:
        raise HardAssertionError(f"#f = {lb.measured} exceeds #DSC = {dsc}")
    return lb


@dataclass
class BoundsReport:
    mu: int
    mu_f: int
    mu_s_min: int
    lower_loose: int
    upper_loose: int
    upper_loose_raw: int
    epsilons: list[float]
    eps_max: float | None
    threshold: str
    branch: str
    mu_star: int | None
    tight_lower: int
    tight_upper: int
    measured: int
    greedy: int
    dsc: int
    loose_upper_holds: bool
    tight_holds: bool

    def to_dict(self) -> dict:
        d = asdict(self)
        d["epsilons"] = [_eps(e) for e in self.epsilons]
        d["eps_max"] = None if self.eps_max is None else _eps(self.eps_max)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "BoundsReport":
        return cls(**d)


def tight_bounds(
    s: SupportSet,
    f: FunctionSpec,
    t: Transcript | None = None,
    tie: TieRule = LOWEST,
    budget: SearchBudget = DEFAULT_BUDGET,
    oracle: Oracle | None = None,
    dsc_oracle: Oracle | None = None,
) -> BoundsReport:
    """Bounds driven by how evenly the first ceil(log2 mu_f) worst-case rounds split.

    With r the largest per-round shrink ratio mu_after/mu_before over those
    rounds, the residual set size is at most T = mu * r**L (L = ceil(log2
    mu_f)), which equals mu / 2**((1 - eps_max) * L). T is kept exact.
    """
    o = oracle or Oracle(s, f, budget)
    p = o.problem
    if t is None:
        t = run_worst_case(s, f, tie)
    if t.mode != "worst-case" or t.n_informants != s.n_informants or t.total_width != s.total_width:
        raise InvalidArgumentError("transcript does not come from a worst-case run on this instance")
    if t.rounds and t.rounds[0].mu_before != len(s.vectors):
        raise InvalidArgumentError("transcript does not start from this support set")
    loose = loose_bounds(s, f, budget, o, dsc_oracle)
    mu = len(s.vectors)
    mult = sorted((m.bit_count() for m in p.output_masks), reverse=True)
    mu_f = len(mult)
    L = bits_needed(mu_f)
    head = t.rounds[:L]
    epsilons = t.epsilons
    eps_max = max((r.epsilon for r in head), default=None)
    if mu_f == 1:
        # no query is ever made; #f is exactly 0
        T = Fraction(mu)
        branch, mu_star, lo, hi = "solved", None, 0, 0
    else:
        ratio = max(Fraction(r.mu_after, r.mu_before) for r in head)
        T = mu * ratio**L
        if T <= loose.mu_s_min:
            branch, mu_star = "small-residual", None
            lo, hi = L, L + bits_needed(loose.mu_s_min)
        else:
            acc, mu_star = 0, 0
            for m in mult:
                acc += m
                mu_star += 1
                if acc >= T:
                    break
            branch = "large-residual"
            lo, hi = L + bits_needed(mu_star), L + _ceil_log2(T)
    measured = o.height()
    return BoundsReport(
        mu=mu,
        mu_f=mu_f,
        mu_s_min=loose.mu_s_min,
        lower_loose=loose.lower,
        upper_loose=loose.upper,
        upper_loose_raw=loose.upper_raw,
        epsilons=epsilons,
        eps_max=eps_max,
        threshold=_fraction_str(T),
        branch=branch,
        mu_star=mu_star,
        tight_lower=lo,
        tight_upper=hi,
        measured=measured,
        greedy=t.total_informant_bits,
        dsc=loose.dsc,
        loose_upper_holds=loose.upper_holds,
        tight_holds=lo <= measured <= hi,
    )


# -- classification -----------------------------------------------------------


@dataclass(frozen=True)
class ClassLabel:
    label: str
    mu_f: int
    mu_domain: int

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "ClassLabel":
        return cls(**d)


def classify(s: SupportSet, f: FunctionSpec) -> ClassLabel:
    mu_f = len(Problem(s, f).values)
    mu = len(s.vectors)
    return ClassLabel("Lossless" if mu_f == mu else "Lossy", mu_f, mu)


# -- audits -------------------------------------------------------------------


def _describe(s: SupportSet, f: FunctionSpec) -> dict:
    from .formats import emit_instance

    return {"function": f.name, "instance": emit_instance(s)}


def audit_lemma4(
    instances: Iterable[tuple[SupportSet, FunctionSpec]], budget: SearchBudget = DEFAULT_BUDGET
) -> dict:
    """Equal output width implies #_f = #_DSC (reported); narrower implies #_f <= #_DSC (asserted)."""
    rows, violations_b = [], []
    for k, (s, f) in enumerate(instances):
        fo = Oracle(s, f, budget).height()
        do = Oracle(s, IDENTITY, budget).height()
        lf, ld = bits_needed(len(Problem(s, f).values)), bits_needed(len(s.vectors))
        row = {"index": k, "function": f.name, "width_f": lf, "width_dsc": ld, "cost_f": fo, "cost_dsc": do}
        if lf == ld:
            row["case"], row["holds"] = "equal-width", fo == do
        else:
            row["case"], row["holds"] = "narrower", fo <= do
            if not row["holds"]:
                violations_b.append(k)
        if not row["holds"]:
            row.update(_describe(s, f))
        rows.append(row)
    report = {
        "claim": "lemma4",
        "checked": len(rows),
        "equal_width_failures": [r["index"] for r in rows if r["case"] == "equal-width" and not r["holds"]],
        "narrower_failures": violations_b,
        "rows": rows,
    }
    if violations_b:
        raise HardAssertionError(f"#f > #DSC on instances {violations_b}")
    return report


def _property_case(mf: tuple[int, int], md: tuple[int, int], cost: tuple[int, int]) -> tuple[int, bool | None]:
    (f1, f2), (d1, d2), (c1, c2) = mf, md, cost
    if f1 == f2 and d1 == d2:
        return 1, None
    if f1 == f2:
        return 2, (c1 <= c2) if d1 < d2 else (c1 >= c2)
    if d1 == d2:
        return 3, (c1 <= c2) if f1 < f2 else (c1 >= c2)
    lo_first = f1 < f2
    same_direction = (d1 < d2) == lo_first
    holds = (c1 <= c2) if lo_first else (c2 <= c1)
    return (4 if same_direction else 5), holds


def pair_by_function(instances: Sequence[tuple[SupportSet, FunctionSpec]]) -> list:
    """Consecutive instances sharing a function, two at a time."""
    groups: dict[FunctionSpec, list] = {}
    for s, f in instances:
        groups.setdefault(f, []).append((s, f))
    return [(a, b) for g in groups.values() for a, b in zip(g[::2], g[1::2])]


def audit_properties(
    pairs: Iterable[tuple[tuple[SupportSet, FunctionSpec], tuple[SupportSet, FunctionSpec]]],
    budget: SearchBudget = DEFAULT_BUDGET,
) -> dict:
    """How #_f compares across two support sets given their output and vector counts."""
    rows = []
    for k, ((s1, f1), (s2, f2)) in enumerate(pairs):
        if f1 != f2:
            raise InvalidArgumentError(f"pair {k} mixes functions {f1.name} and {f2.name}")
        mf = (len(Problem(s1, f1).values), len(Problem(s2, f2).values))
        md = (len(s1.vectors), len(s2.vectors))
        cost = (Oracle(s1, f1, budget).height(), Oracle(s2, f2, budget).height())
        case, holds = _property_case(mf, md, cost)
        row = {"index": k, "function": f1.name, "mu_f": list(mf), "mu_dsc": list(md), "cost_f": list(cost),
               "property": case, "holds": holds}
        if holds is False:
            row["first"] = _describe(s1, f1)["instance"]
            row["second"] = _describe(s2, f2)["instance"]
        rows.append(row)
    by_case = {}
    for c in range(1, 6):
        sel = [r for r in rows if r["property"] == c]
        by_case[str(c)] = {
            "checked": len(sel),
            "failures": [r["index"] for r in sel if r["holds"] is False],
            "informational": c == 1,
        }
    return {"claim": "properties", "checked": len(rows), "by_property": by_case, "rows": rows}


def audit_theorem1(
    instances: Iterable[tuple[SupportSet, FunctionSpec]],
    tie: TieRule = LOWEST,
    budget: SearchBudget = DEFAULT_BUDGET,
) -> dict:
    """Gap between the greedy worst-case cost and the exact #_f."""
    rows = []
    for k, (s, f) in enumerate(instances):
        exact = Oracle(s, f, budget).height()
        greedy = run_worst_case(s, f, tie).total_informant_bits
        if greedy < exact:
            raise HardAssertionError(f"greedy cost {greedy} beats the exact optimum {exact} on instance {k}")
        row = {"index": k, "function": f.name, "exact": exact, "greedy": greedy, "gap": greedy - exact}
        if greedy != exact:
            row.update(_describe(s, f))
        rows.append(row)
    gaps = [r["gap"] for r in rows]
    return {
        "claim": "greedy-optimality",
        "checked": len(rows),
        "failures": [r["index"] for r in rows if r["gap"]],
        "max_gap": max(gaps, default=0),
        "rows": rows,
    }


def audit_claims(
    instances: Sequence[tuple[SupportSet, FunctionSpec]],
    tie: TieRule = LOWEST,
    budget: SearchBudget = DEFAULT_BUDGET,
    enumerate_limit: int = 64,
) -> dict:
    """Every audited claim over one instance list, plus the hard lemma-4 part.

    Property pairs are formed from consecutive instances sharing a function.
    """
    claims = {name: {"checked": 0, "failures": []} for name in
              ("loose-upper", "tight-interval", "lemma4-equal-width", "lemma4-narrower",
               "corner-achievability", "greedy-optimality")}

    def fail(name: str, k: int, s: SupportSet, f: FunctionSpec, **extra) -> None:
        claims[name]["failures"].append({"index": k, **_describe(s, f), **extra})

    for k, (s, f) in enumerate(instances):
        o = Oracle(s, f, budget)
        od = Oracle(s, IDENTITY, budget)
        t = run_worst_case(s, f, tie)
        rep = tight_bounds(s, f, t, oracle=o, dsc_oracle=od)
        for name, ok, extra in (
            ("loose-upper", rep.loose_upper_holds, {"cost_f": rep.measured, "upper": rep.upper_loose_raw}),
            ("tight-interval", rep.tight_holds,
             {"cost_f": rep.measured, "interval": [rep.tight_lower, rep.tight_upper], "branch": rep.branch}),
            ("greedy-optimality", rep.greedy == rep.measured, {"cost_f": rep.measured, "greedy": rep.greedy}),
        ):
            claims[name]["checked"] += 1
            if not ok:
                fail(name, k, s, f, **extra)
        lf, ld = bits_needed(rep.mu_f), bits_needed(rep.mu)
        if lf == ld:
            claims["lemma4-equal-width"]["checked"] += 1
            if rep.measured != rep.dsc:
                fail("lemma4-equal-width", k, s, f, cost_f=rep.measured, cost_dsc=rep.dsc)
        else:
            claims["lemma4-narrower"]["checked"] += 1
            if rep.measured > rep.dsc:
                fail("lemma4-narrower", k, s, f, cost_f=rep.measured, cost_dsc=rep.dsc)
        if s.n_informants == 2:
            region = rate_region(s, f, enumerate_limit, oracle=o)
            claims["corner-achievability"]["checked"] += 1
            if not all(region.corner_achievable):
                fail("corner-achievability", k, s, f, b=region.b, total=region.total,
                     corners=region.corners, pareto=region.pareto)

    props = audit_properties(pair_by_function(instances), budget)
    for c in ("2", "3", "4", "5"):
        entry = props["by_property"][c]
        claims[f"property-{c}"] = {
            "checked": entry["checked"],
            "failures": [r for r in props["rows"] if r["property"] == int(c) and r["holds"] is False],
        }
    claims["property-1"] = {"checked": props["by_property"]["1"]["checked"], "failures": [], "informational": True}

    summary = {name: {"checked": c["checked"], "violations": len(c["failures"])} for name, c in claims.items()}
    report = {"instances": len(instances), "summary": summary, "claims": claims}
    if claims["lemma4-narrower"]["failures"]:
        raise HardAssertionError("#f > #DSC on some instance")
    return report
