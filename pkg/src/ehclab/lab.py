"""Empirical probes: minimum tr over H-free tournaments, epsilon estimates,
criticality scans, lemma witness searches, extraction sweeps and reports."""

from __future__ import annotations

import csv
import io
import json
import math
import time
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations

import networkx as nx

from .core import (MAX_ENUMERATE, Tournament, canonical_form, contains, enumerate_tournaments,
                   is_epsilon_critical, iter_bits, mask_of, popcount, random_tournament, tr)
from .families import BETA_KINDS, Component, FamilySpec, SpiderSpec, component_local, validate
from .mutants import corresponding_digraph, mutant_clutter
from .parallel import run_chunks
from .rng import SplitMix64, derive_seed
from .smooth import (LemmaViolation, extract_asterism, extract_spider_or_triangle,
                     restriction_margin, subset_density_bound, tightest_constants)

SCHEMA = "ehc-report/1"
CSV_COLUMNS = ("n", "min_tr", "count", "witness_canonical", "eps_running")
DEFAULT_DIVISOR = 12


class NoFreeTournament(ValueError):
    """Every tournament of the requested size contains H."""


def describe(t: Tournament) -> str:
    """Canonical bitstring when small enough, else the raw pair bitstring."""
    try:
        return canonical_form(t)
    except ValueError:
        return t.bits()


# ---------------------------------------------------------------- min tr over H-free tournaments

def _scan_classes(h_bits: str, h_n: int, n: int, lo: int, hi: int):
    h = Tournament.from_bits(h_n, h_bits)
    best = None
    free = 0
    for t in enumerate_tournaments(n)[lo:hi]:
        if contains(t, h) is not None:
            continue
        free += 1
        value = tr(t)[0]
        key = (value, t.bits())
        if best is None or key < best:
            best = key
    return best, free


def _scan_samples(h_bits: str, h_n: int, n: int, seed: int, lo: int, hi: int):
    h = Tournament.from_bits(h_n, h_bits)
    best = None
    free = 0
    for i in range(lo, hi):
        t = random_tournament(n, derive_seed(seed, i))
        if contains(t, h) is not None:
            continue
        free += 1
        value = tr(t)[0]
        if best is None or value < best[0]:
            best = (value, t.bits())
    return best, free


@dataclass
class MinTr:
    value: int
    witness: Tournament
    examined: int          # tournaments looked at (classes or samples)
    free: int              # how many of them were H-free


def min_tr_H_free(h: Tournament, n: int, mode: str = "exhaustive", samples: int = 0,
                  seed: int = 0, jobs: int | None = 1) -> MinTr:
    """Exact minimum (exhaustive) or an upper bound with witness (sample).

    The witness is the least (tr, bitstring) pair among the minimisers of
    each chunk, so the answer does not depend on chunking or worker count.
    """
    if n < 1:
        raise ValueError("n must be positive")
    if mode == "exhaustive":
        if n > MAX_ENUMERATE:
            raise ValueError(f"exhaustive mode needs n <= {MAX_ENUMERATE}")
        total = len(enumerate_tournaments(n))
        step = max(1, -(-total // 16))
        tasks = [(h.bits(), h.n, n, lo, min(total, lo + step)) for lo in range(0, total, step)]
        parts = run_chunks(_scan_classes, tasks, jobs)
    elif mode == "sample":
        if samples < 1:
            raise ValueError("sample mode needs samples >= 1")
        total = samples
        step = 4096
        tasks = [(h.bits(), h.n, n, seed, lo, min(total, lo + step)) for lo in range(0, total, step)]
        parts = run_chunks(_scan_samples, tasks, jobs)
    else:
        raise ValueError(f"unknown mode {mode!r}")
    hits = [b for b, _ in parts if b is not None]
    free = sum(f for _, f in parts)
    if not hits:
        raise NoFreeTournament(f"every one of the {total} examined {n}-vertex tournaments contains H")
    value, bits = min(hits) if mode == "exhaustive" else min(hits, key=lambda b: b[0])
    return MinTr(value, Tournament.from_bits(n, bits), total, free)


# ---------------------------------------------------------------- scan reports

@dataclass
class ScanRow:
    n: int
    min_tr: int
    count: int
    witness: str
    eps_running: float


@dataclass
class ScanReport:
    h: str
    mode: str
    seed: int
    samples: int
    rows: list = field(default_factory=list)
    runtime: float = 0.0

    @property
    def epsilon(self) -> float:
        """min over rows of log(min tr)/log n; 1.0 with no rows."""
        return min((_ratio(r.min_tr, r.n) for r in self.rows), default=1.0)

    def to_dict(self, timing: bool = False) -> dict:
        data = {
            "schema": SCHEMA,
            "h": self.h,
            "mode": self.mode,
            "seed": self.seed,
            "samples": self.samples,
            "epsilon": self.epsilon,
            "rows": [{"n": r.n, "min_tr": r.min_tr, "count": r.count,
                      "witness_canonical": r.witness, "eps_running": r.eps_running}
                     for r in self.rows],
        }
        if timing:
            data["runtime"] = self.runtime
        return data

    def to_json(self, timing: bool = False) -> str:
        return json.dumps(self.to_dict(timing), sort_keys=True, indent=2) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "ScanReport":
        data = json.loads(text)
        if data.get("schema") != SCHEMA:
            raise ValueError(f"unsupported report schema {data.get('schema')!r}")
        rows = [ScanRow(r["n"], r["min_tr"], r["count"], r["witness_canonical"], r["eps_running"])
                for r in data["rows"]]
        return cls(data["h"], data["mode"], data["seed"], data["samples"], rows,
                   data.get("runtime", 0.0))

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for r in self.rows:
            writer.writerow([r.n, r.min_tr, r.count, r.witness, repr(r.eps_running)])
        return buf.getvalue()

    def __eq__(self, other):
        return isinstance(other, ScanReport) and self.to_dict() == other.to_dict()


def _ratio(value: int, n: int) -> float:
    return math.log(value) / math.log(n)


def epsilon_estimate(h: Tournament, n_max: int, mode: str = "exhaustive", samples: int = 0,
                     seed: int = 0, jobs: int | None = 1) -> ScanReport:
    if n_max < 2:
        raise ValueError("n_max must be at least 2")
    start = time.perf_counter()
    report = ScanReport(describe(h), mode, seed, samples if mode == "sample" else 0)
    running = 1.0
    for n in range(2, n_max + 1):
        # each row gets its own seed stream so rows do not share samples
        row_seed = derive_seed(seed, n)
        result = min_tr_H_free(h, n, mode, samples, row_seed, jobs)
        running = min(running, _ratio(result.value, n))
        report.rows.append(ScanRow(n, result.value, result.examined, describe(result.witness), running))
    report.runtime = time.perf_counter() - start
    return report


def emit_report(report: ScanReport, fmt: str, path=None, timing: bool = False) -> str:
    """Serialize deterministically; write to `path` when given.  Returns the text."""
    if fmt == "json":
        text = report.to_json(timing)
    elif fmt == "csv":
        text = report.to_csv()
    else:
        raise ValueError(f"unknown report format {fmt!r}")
    if path is not None:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    return text


def criticality_scan(eps, n_max: int) -> list:
    """Canonical bitstrings (with size) of every eps-critical tournament on at most n_max vertices."""
    if n_max > MAX_ENUMERATE:
        raise ValueError(f"criticality scan needs n_max <= {MAX_ENUMERATE}")
    found = []
    for n in range(1, n_max + 1):
        for t in enumerate_tournaments(n):
            if is_epsilon_critical(t, eps):
                found.append((n, t.bits()))
    return found


# ---------------------------------------------------------------- lemma witness patterns

def _check_sets(t: Tournament, sets):
    seen = set()
    for s in sets:
        for v in s:
            if not 0 <= v < t.n:
                raise ValueError(f"vertex {v} out of range")
            if v in seen:
                raise ValueError(f"vertex {v} appears in two sets")
            seen.add(v)


def _backward_matching(t: Tournament, xs, ys) -> list:
    """Maximum set of disjoint pairs (x, y) with y -> x."""
    g = nx.Graph()
    left = [("x", x) for x in xs]
    g.add_nodes_from(left)
    g.add_nodes_from(("y", y) for y in ys)
    g.add_edges_from((("x", x), ("y", y)) for x in xs for y in ys if t.has_arc(y, x))
    match = nx.bipartite.hopcroft_karp_matching(g, top_nodes=left)
    return sorted((x, match[("x", x)][1]) for x in xs if ("x", x) in match)


def _witness_v(t, sets, params):
    if len(sets) != 2:
        raise ValueError("pattern v needs two sets X, Y")
    pairs = _backward_matching(t, sets[0], sets[1])
    need = int(params.get("k", 1))
    return {"pairs": pairs[:need]} if len(pairs) >= need else None


def _witness_f(t, sets, params):
    """A arc in each direction between A and G; reports which direction is missing."""
    if len(sets) != 2:
        raise ValueError("pattern f needs two sets A, G")
    a_set, g_set = sets
    into_g = next(((a, g) for a in a_set for g in g_set if t.has_arc(a, g)), None)
    into_a = next(((g, a) for g in g_set for a in a_set if t.has_arc(g, a)), None)
    if into_g and into_a:
        return {"a_to_g": into_g, "g_to_a": into_a}
    missing = []
    if into_g is None:
        missing.append("A is complete from G")
    if into_a is None:
        missing.append("A is complete to G")
    return {"missing": missing, "a_to_g": into_g, "g_to_a": into_a, "absent": True}


def _witness_s(t, sets, params):
    """Sets (S1, S2, A1, A2).  Variant 1: x -> a, x -> s2, a -> s1.
    Variant 2: u1 -> d1, d2 -> d1, u2 -> d2."""
    if len(sets) != 4:
        raise ValueError("pattern s needs sets S1, S2, A1, A2")
    s1, s2, a1, a2 = (mask_of(s) for s in sets)
    variant = int(params.get("variant", 1))
    if variant == 1:
        for a in iter_bits(a1):
            if not t.out[a] & s1:
                continue
            for x in iter_bits(a2 & t.inn[a]):
                hit = t.out[x] & s2
                if hit:
                    return {"a": a, "x": x, "s1": min(iter_bits(t.out[a] & s1)), "s2": min(iter_bits(hit))}
        return None
    if variant == 2:
        for d1 in iter_bits(a1):
            if not t.inn[d1] & s1:
                continue
            for d2 in iter_bits(a2 & t.inn[d1]):
                hit = t.inn[d2] & s2
                if hit:
                    return {"d1": d1, "d2": d2, "u1": min(iter_bits(t.inn[d1] & s1)), "u2": min(iter_bits(hit))}
        return None
    raise ValueError("pattern s variant must be 1 or 2")


def _witness_r(t, sets, params):
    """Sets (S1..Sm, A).  The anchor a in A beats the members chosen from
    the sets listed as 'beaten' and is beaten by the rest, per variant:
    1 beats S1..S(m-1), 2 beats S1 only, 3 beats all, 4 beats none."""
    if len(sets) < 2:
        raise ValueError("pattern r needs sets S1..Sm and A")
    *ss, anchor_set = sets
    m = len(ss)
    variant = int(params.get("variant", 1))
    beaten = {1: set(range(m - 1)), 2: {0}, 3: set(range(m)), 4: set()}.get(variant)
    if beaten is None:
        raise ValueError("pattern r variant must be 1..4")
    masks = [mask_of(s) for s in ss]
    for a in sorted(anchor_set):
        members = []
        for i, sm in enumerate(masks):
            hit = sm & (t.out[a] if i in beaten else t.inn[a])
            if not hit:
                break
            members.append(min(iter_bits(hit)))
        else:
            return {"anchor": a, "members": members}
    return None


_PATTERNS = {"v": _witness_v, "f": _witness_f, "s": _witness_s, "r": _witness_r}


def find_pattern_witness(pattern: str, t: Tournament, sets, params=None):
    if pattern not in _PATTERNS:
        raise ValueError(f"unknown pattern {pattern!r}; choose from {sorted(_PATTERNS)}")
    sets = [list(s) for s in sets]
    if any(not s for s in sets):
        raise ValueError("sets must be nonempty")
    _check_sets(t, sets)
    return _PATTERNS[pattern](t, sets, dict(params or {}))


# ---------------------------------------------------------------- soundness sweeps

@dataclass
class SweepReport:
    target: str
    tried: int = 0
    failures: list = field(default_factory=list)
    tags: dict = field(default_factory=dict)

    @property
    def passed(self) -> int:
        return self.tried - len(self.failures)

    def summary(self) -> str:
        return f"{self.passed}/{self.tried} pass"


def _spider_params(sp: SpiderSpec) -> dict:
    if sp.kind == "middle":
        return {"side": "middle", "left_legs": sp.left_legs}
    return {"side": sp.kind, "x1": list(sp.x1)}


def small_spiders(max_legs: int = 3) -> list:
    """Every spider shape with at most max_legs legs."""
    out = []
    for m in range(max_legs + 1):
        for r in range(max_legs + 1 - m):
            out.append(SpiderSpec("middle", left_legs=m, right_legs=r))
    for side in ("left", "right"):
        for legs in range(max_legs + 1):
            idx = SpiderSpec(side, legs=legs).leg_indices()
            for k in range(legs + 1):
                for x1 in combinations(idx, k):
                    out.append(SpiderSpec(side, legs=legs, x1=x1))
    return out


def spider_label(sp: SpiderSpec) -> str:
    if sp.kind == "middle":
        return f"spider:middle:{sp.left_legs}:{sp.right_legs}"
    return f"spider:{sp.kind}:{sp.legs}:{','.join(map(str, sp.x1))}"


def parse_spider_label(text: str) -> SpiderSpec:
    parts = text.split(":")
    try:
        if parts[0] != "spider":
            raise ValueError
        if parts[1] == "middle":
            return SpiderSpec("middle", left_legs=int(parts[2]), right_legs=int(parts[3]))
        x1 = tuple(int(x) for x in parts[3].split(",") if x) if len(parts) > 3 else ()
        sp = SpiderSpec(parts[1], legs=int(parts[2]), x1=x1)
        sp.validate()
        return sp
    except (IndexError, ValueError):
        raise ValueError(f"bad spider target {text!r}; use spider:middle:M:R or "
                         f"spider:left|right:LEGS:X1") from None


def soundness_sweep(target) -> SweepReport:
    """Extract from every completion of the target's mutant and check the result."""
    if isinstance(target, str) and target in BETA_KINDS:
        spec = FamilySpec("asterism", 7, [Component("beta", tuple(range(7)), {"kind": target})])
        return _sweep_asterism(spec, target)
    if isinstance(target, FamilySpec):
        if target.family == "asterism":
            return _sweep_asterism(target, "asterism")
        return _sweep_spiders(target, target.family)
    if isinstance(target, str) and target.startswith("spider:"):
        target = parse_spider_label(target)
    if isinstance(target, SpiderSpec):
        spec = FamilySpec("galaxy_with_spiders", target.n,
                          [Component("spider", tuple(range(target.n)), _spider_params(target))])
        return _sweep_spiders(spec, spider_label(target))
    raise ValueError(f"unknown sweep target {target!r}")


def _sweep_asterism(spec: FamilySpec, name: str) -> SweepReport:
    report = SweepReport(name)
    cd = corresponding_digraph(spec)
    identity = {u: u for u in range(cd.digraph.n)}
    for k, comp in enumerate(cd.digraph.completions()):
        report.tried += 1
        try:
            ext = extract_asterism(cd, identity, comp)
            key = "".join("cf"[c == 3] for c in ext.cases)
            report.tags[key] = report.tags.get(key, 0) + 1
        except AssertionError as exc:
            report.failures.append((k, str(exc)))
    return report


def _sweep_spiders(spec: FamilySpec, name: str) -> SweepReport:
    problems = validate(spec)
    if problems:
        raise ValueError("; ".join(problems))
    report = SweepReport(name)
    d, _ = mutant_clutter(spec)
    identity = {u: u for u in range(d.n)}
    for k, comp in enumerate(d.completions()):
        report.tried += 1
        try:
            pieces = extract_spider_or_triangle(spec, identity, comp)
            key = "".join(p.tag for p in pieces)
            report.tags[key] = report.tags.get(key, 0) + 1
            for p in pieces:
                if p.tag == "s" and comp.induced(p.vertices) != _spider_of(spec, p.spider):
                    raise AssertionError("tag s but the copy is not the spider")
        except AssertionError as exc:
            report.failures.append((k, str(exc)))
    return report


def _spider_of(spec: FamilySpec, index: int) -> Tournament:
    return component_local(spec.of_kind("spider")[index])[0]


# ---------------------------------------------------------------- deterministic lemma fuzzing

@dataclass
class FuzzReport:
    lemma: str
    instances: int = 0
    violations: list = field(default_factory=list)
    min_margin: Fraction | None = None

    @property
    def passed(self) -> bool:
        return not self.violations


def _biased_tournament(rng: SplitMix64, n: int, blocks, flip: Fraction) -> Tournament:
    """Random inside each block; between blocks the arc points from the earlier
    block to the later one unless flipped, with probability `flip`."""
    where = {v: i for i, b in enumerate(blocks) for v in b}
    out = [0] * n
    scale = 1 << 20
    cut = int(flip * scale)
    for a in range(n):
        for b in range(a + 1, n):
            if where[a] == where[b]:
                u, v = (a, b) if rng.next() & 1 else (b, a)
            else:
                u, v = (a, b) if where[a] < where[b] else (b, a)
                if rng.below(scale) < cut:
                    u, v = v, u
            out[u] |= 1 << v
    return Tournament(n, out)


def _rational_at_most(rng: SplitMix64, bound: Fraction) -> Fraction:
    """Either `bound` itself or a random rational in (0, bound]."""
    if rng.below(2):
        return bound
    return bound * Fraction(1 + rng.below(16), 16)


def _random_subset(rng: SplitMix64, items, least: int = 1) -> list:
    items = list(items)
    size = least + rng.below(len(items) - least + 1)
    rng.shuffle(items)
    return sorted(items[:size])


def fuzz_lemma_b(instances: int, seed: int, max_n: int = 30) -> FuzzReport:
    rng = SplitMix64(seed)
    report = FuzzReport("b")
    for k in range(instances):
        n = 4 + rng.below(max_n - 3)
        cut = 1 + rng.below(n - 1)
        verts = list(range(n))
        rng.shuffle(verts)
        a1, a2 = sorted(verts[:cut]), sorted(verts[cut:])
        t = _biased_tournament(rng, n, [a1, a2], Fraction(rng.below(5), 10))
        d = sum(popcount(t.out[v] & mask_of(a2)) for v in a1)
        lam = 1 - Fraction(d, len(a1) * len(a2))
        if lam == 0 or rng.below(3) == 0:
            lam += Fraction(1 + rng.below(4), 16)
        if lam <= 0:
            continue
        x, y = _random_subset(rng, a1), _random_subset(rng, a2)
        eta1 = _rational_at_most(rng, Fraction(len(x), len(a1)))
        eta2 = _rational_at_most(rng, Fraction(len(y), len(a2)))
        report.instances += 1
        try:
            margin = subset_density_bound(t, a1, a2, x, y, lam, eta1, eta2)
        except LemmaViolation as exc:
            report.violations.append((k, str(exc)))
            continue
        report.min_margin = margin if report.min_margin is None else min(report.min_margin, margin)
    return report


def fuzz_lemma_g(instances: int, seed: int, max_n: int = 30) -> FuzzReport:
    rng = SplitMix64(seed)
    report = FuzzReport("g")
    for k in range(instances):
        n = 6 + rng.below(max_n - 5)
        count = 2 + rng.below(min(4, n // 2) - 1)
        verts = list(range(n))
        rng.shuffle(verts)
        cuts = sorted(rng.sample(range(1, n), count - 1))
        sets = [sorted(verts[a:b]) for a, b in zip([0] + cuts, cuts + [n])]
        t = _biased_tournament(rng, n, sets, Fraction(rng.below(3), 20))
        _, lam = tightest_constants(t, sets, [0] * len(sets))
        if lam == 0 or rng.below(3) == 0:
            lam += Fraction(1 + rng.below(4), 32)
        j = rng.below(len(sets))
        subset = _random_subset(rng, sets[j])
        gamma = _rational_at_most(rng, Fraction(len(subset), len(sets[j])))
        others = [v for i, s in enumerate(sets) if i != j for v in s]
        outside = _random_subset(rng, others, least=0) if others else []
        report.instances += 1
        try:
            margin = restriction_margin(t, sets, [0] * len(sets), lam, j, subset, outside, gamma)
        except LemmaViolation as exc:
            report.violations.append((k, str(exc)))
            continue
        report.min_margin = margin if report.min_margin is None else min(report.min_margin, margin)
    return report
