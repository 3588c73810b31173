"""Catalog of small cited designs, backed by a deterministic backtracking search.

The composer consumes a handful of externally-known small designs:
Kirkman-type resolvable triangle systems, resolvable group divisible
designs with block size 3, single-cycle-length factorizations of
complete equipartite graphs, and small mixed base solutions.  Rather
than bundling tables, this module searches for each instance with a
deterministic factor-by-factor backtracking and caches the verified
result on disk (root from ``HWP_CACHE`` or ``~/.cache/hwp-engine``).

Search order is fixed: factors are built longest cycle length first; a
factor grows cycle by cycle, each cycle starting at the lowest vertex
not yet covered by the factor and extending through available neighbors
in ascending id.  Symmetry is cut three ways, all label-exact:

  * on a pristine complete or equipartite graph the first factor is
    pinned to a canonical representative (any uniform 2-factor of K_v is
    equivalent to consecutive blocks under relabeling; any transverse
    triangle class of K_{(h:u)} for u in {3,4} is equivalent to a fixed
    pattern under part-preserving relabeling);
  * cycles are used once per reflection (second vertex below last);
  * consecutive factors of the same cycle length are forced into
    increasing order of vertex 0's smallest neighbor (those neighbor
    pairs are disjoint across factors, so every solution can be so
    ordered).

Because the cuts only quotient by relabelings, a fully exhausted search
is still a certificate of nonexistence; running out of budget is
reported separately.

For K_v minus a 1-factor the search runs on all of K_v with one fewer
round of factors; whatever edges remain form a 1-regular graph, i.e.
exactly the removed perfect matching.
"""

from __future__ import annotations

import math
import os
import time
from dataclasses import dataclass
from pathlib import Path

from . import fileformat
from .core import (
    COMPLETE,
    EQUIPARTITE,
    M_TAG,
    MINUS_F,
    N_TAG,
    Cycle,
    Decomposition,
    GraphSpec,
    OneFactor,
    Rgdd,
    TwoFactor,
    verify,
)
from .constructions import ParameterError

INFEASIBLE = "infeasible-by-theory"
BUDGET_EXHAUSTED = "budget-exhausted"
SEARCH_EXHAUSTED = "search-exhausted"


@dataclass(frozen=True)
class SearchBudget:
    """Limits for one search; ``seed`` is a reserved branch-order knob (0 = ascending)."""

    max_seconds: float | None = 60.0
    max_nodes: int | None = None
    seed: int = 0

    def __post_init__(self) -> None:
        if self.max_seconds is not None and self.max_seconds <= 0:
            raise ValueError("time budget must be positive")
        if self.max_nodes is not None and self.max_nodes <= 0:
            raise ValueError("node budget must be positive")


DEFAULT_BUDGET = SearchBudget()


@dataclass(frozen=True)
class NotFound:
    """Search outcome that is not an object: why there is nothing to return."""

    reason: str  # INFEASIBLE | BUDGET_EXHAUSTED | SEARCH_EXHAUSTED
    detail: str = ""


@dataclass(frozen=True)
class IngredientKey:
    """Normalized name of a cited design instance."""

    kind: str  # "kts" | "rgdd3" | "equip" | "hwp"
    params: tuple[int, ...]

    @classmethod
    def kts(cls, v: int) -> "IngredientKey":
        return cls("kts", (v,))

    @classmethod
    def rgdd3(cls, h: int, u: int) -> "IngredientKey":
        return cls("rgdd3", (h, u))

    @classmethod
    def equipartite_factorization(cls, h: int, u: int, m: int) -> "IngredientKey":
        return cls("equip", (h, u, m))

    @classmethod
    def base_hwp(
        cls, v: int, m: int, n: int, r: int, s: int, minus_f: bool
    ) -> "IngredientKey":
        return cls("hwp", (v, m, n, r, s, int(minus_f)))

    def filename(self) -> str:
        return self.kind + "_" + "_".join(str(p) for p in self.params) + ".hwp"

    def __str__(self) -> str:
        if self.kind == "kts":
            return f"KTS({self.params[0]})"
        if self.kind == "rgdd3":
            return f"3-RGDD({self.params[0]}^{self.params[1]})"
        if self.kind == "equip":
            h, u, m = self.params
            return f"C{m}-factorization of K_({h}:{u})"
        v, m, n, r, s, mf = self.params
        graph = f"K_{v}-F" if mf else f"K_{v}"
        return f"({m},{n})-HWP({graph};{r},{s})"


# ---------------------------------------------------------------------------
# Known existence theory for the cited families
# ---------------------------------------------------------------------------


def resolvable_cycle_factorization_exists(v: int, length: int) -> bool:
    """Resolvable C_length-factorization of K_v (v odd) or K_v-F (v even)."""
    return v % length == 0 and (length, v) != (3, 6) and (length, v) != (3, 12)


def kts_infeasible(v: int) -> str | None:
    if v % 6 != 3:
        return f"KTS(v) exists iff v = 3 (mod 6); v={v}"
    return None


def rgdd3_infeasible(h: int, u: int) -> str | None:
    if u < 3:
        return "3-RGDD needs at least 3 groups"
    if (h * (u - 1)) % 2 != 0:
        return f"3-RGDD(h^u) needs h(u-1) even; h={h}, u={u}"
    if (h * u) % 3 != 0:
        return f"3-RGDD(h^u) needs hu = 0 (mod 3); h={h}, u={u}"
    if (h, u) in ((2, 6), (6, 3), (2, 3)):
        return f"3-RGDD({h}^{u}) is a known exception"
    return None


def equipartite_factorization_infeasible(h: int, u: int, m: int) -> str | None:
    if m < 3 or u < 2:
        return "need m >= 3 and u >= 2"
    if (h * u) % m != 0:
        return f"C_{m}-factorization of K_({h}:{u}) needs m | hu"
    if (h * (u - 1)) % 2 != 0:
        return f"resolvable factorization of K_({h}:{u}) needs h(u-1) even"
    if u == 2 and m % 2 != 0:
        return "two parts force even cycle lengths"
    if (h, u, m) in ((2, 3, 3), (6, 3, 3), (2, 6, 3), (6, 2, 6)):
        return f"(h,u,m)=({h},{u},{m}) is a known exception"
    return None


def base_hwp_infeasible(v: int, m: int, n: int, r: int, s: int, minus_f: bool) -> str | None:
    if minus_f != (v % 2 == 0):
        return "a 1-factor is removed exactly when v is even"
    want = (v - 2) // 2 if minus_f else (v - 1) // 2
    if r + s != want:
        return f"v={v} needs r+s={want}, got {r + s}"
    if r > 0 and v % m != 0:
        return f"r>0 needs {m} | {v}"
    if s > 0 and v % n != 0:
        return f"s>0 needs {n} | {v}"
    if s == 0 and not resolvable_cycle_factorization_exists(v, m):
        return f"no resolvable C_{m}-factorization of K_{v} (excluded small case)"
    if r == 0 and not resolvable_cycle_factorization_exists(v, n):
        return f"no resolvable C_{n}-factorization of K_{v} (excluded small case)"
    if m == 3 and n == v and s == 1 and v == 9:
        return "no decomposition of K_9 into 3 triangle factors and one Hamilton cycle"
    return None


def key_infeasible(key: IngredientKey) -> str | None:
    if key.kind == "kts":
        return kts_infeasible(*key.params)
    if key.kind == "rgdd3":
        return rgdd3_infeasible(*key.params)
    if key.kind == "equip":
        return equipartite_factorization_infeasible(*key.params)
    if key.kind == "hwp":
        v, m, n, r, s, mf = key.params
        return base_hwp_infeasible(v, m, n, r, s, bool(mf))
    raise ParameterError(f"unknown ingredient kind {key.kind!r}")


# ---------------------------------------------------------------------------
# The backtracking engine
# ---------------------------------------------------------------------------


class _StopSearch(Exception):
    pass


def _initial_adjacency(graph: GraphSpec) -> list[int]:
    v = graph.v
    full = (1 << v) - 1
    adj = []
    for a in range(v):
        if graph.kind == EQUIPARTITE:
            h = graph.h
            part_mask = ((1 << h) - 1) << (a // h * h)
            adj.append(full & ~part_mask)
        else:
            adj.append(full & ~(1 << a))
    return adj


def _canonical_first_factor(
    graph: GraphSpec, length: int
) -> tuple[bool, list[tuple[int, ...]]] | None:
    """A first-factor pin that is WLOG on the pristine graph, or None.

    Returns (complete_factor?, cycles).  On K_v any uniform factor
    relabels to consecutive blocks.  On K_{(h:u)} a triangle class
    relabels, part-preservingly, to a fixed pattern when u is 3 or 4
    (the per-group miss counts are forced); for u >= 5 only the triangle
    through vertex 0 can be pinned to (0, h, 2h).
    """
    v = graph.v
    if graph.kind in (COMPLETE, MINUS_F):
        return True, [tuple(range(c * length, (c + 1) * length)) for c in range(v // length)]
    h, u = graph.h, graph.u
    if length != 3:
        return None
    if u == 3:
        return True, [(k, h + k, 2 * h + k) for k in range(h)]
    if u == 4 and h % 3 == 0:
        # Each group misses h/3 of the 4h/3 triangles; h = 0 (mod 3) holds
        # whenever the class size 4h/3 is integral.
        t = h // 3
        cycles = []
        for k in range(t):
            cycles.append((k, h + k, 2 * h + k))
        for k in range(t):
            cycles.append((t + k, h + t + k, 3 * h + k))
        for k in range(t):
            cycles.append((2 * t + k, 2 * h + t + k, 3 * h + t + k))
        for k in range(t):
            cycles.append((h + 2 * t + k, 2 * h + 2 * t + k, 3 * h + 2 * t + k))
        return True, cycles
    return False, [(0, h, 2 * h)]


def _search_two_factorization(
    graph: GraphSpec,
    lengths: list[int],
    leftover_matching: bool,
    budget: SearchBudget,
    adj_override: list[int] | None = None,
):
    """Core DFS.  Returns (factors, matching, nodes) or (None, reason, nodes).

    ``factors`` is a list of factors, each a list of cycle tuples in
    construction order; ``matching`` is the leftover 1-factor edge list
    when requested.  ``adj_override`` searches a custom edge set instead
    of the pristine graph (first-factor pinning is then skipped).
    """
    v = graph.v
    full = (1 << v) - 1
    adj = list(adj_override) if adj_override is not None else _initial_adjacency(graph)
    k = len(lengths)
    deadline = (
        time.monotonic() + budget.max_seconds if budget.max_seconds is not None else None
    )
    max_nodes = budget.max_nodes
    nodes = 0
    factors: list[list[tuple[int, ...]]] = []
    solution: list[list[tuple[int, ...]]] | None = None
    leftover: list[tuple[int, int]] | None = None

    def tick() -> None:
        nonlocal nodes
        nodes += 1
        if max_nodes is not None and nodes > max_nodes:
            raise _StopSearch
        if deadline is not None and nodes % 4096 == 0 and time.monotonic() > deadline:
            raise _StopSearch

    def capture() -> None:
        nonlocal solution, leftover
        solution = [list(f) for f in factors]
        if leftover_matching:
            leftover = [
                (a, b)
                for a in range(v)
                for b in range(a + 1, v)
                if adj[a] >> b & 1
            ]

    def degree_viable(uncov: int) -> bool:
        m = uncov
        while m:
            b = m & -m
            u = b.bit_length() - 1
            m ^= b
            if (adj[u] & uncov).bit_count() < 2:
                return False
        return True

    # Indices from which every remaining factor is a triangle factor; past
    # that point each remaining edge must still close a triangle (or, in
    # leftover mode, the triangle-free edges must form a partial matching).
    all_triangles_from = k
    while all_triangles_from > 0 and lengths[all_triangles_from - 1] == 3:
        all_triangles_from -= 1

    def triangle_closure_ok() -> bool:
        loose = 0
        for a in range(v):
            m = adj[a] & ~((2 << a) - 1)
            while m:
                bit = m & -m
                b = bit.bit_length() - 1
                m ^= bit
                if not adj[a] & adj[b]:
                    if not leftover_matching:
                        return False
                    pair = (1 << a) | bit
                    if loose & pair:
                        return False
                    loose |= pair
        return True

    def factor_start(fi: int, prev_a: int) -> bool:
        if fi == k:
            capture()
            return True
        if fi >= all_triangles_from and not triangle_closure_ok():
            return False
        return next_cycle(fi, prev_a, full, [])

    def next_cycle(fi: int, prev_a: int, uncov: int, cycles: list) -> bool:
        if uncov == 0:
            factors.append(cycles)
            a = cycles[0][1]
            nxt = a if fi + 1 < k and lengths[fi + 1] == lengths[fi] else -1
            ok = factor_start(fi + 1, nxt)
            factors.pop()
            return ok
        if lengths[fi] == 3:
            return next_triangle(fi, prev_a, uncov, cycles)
        return next_path_cycle(fi, prev_a, uncov, cycles)

    def next_triangle(fi: int, prev_a: int, uncov: int, cycles: list) -> bool:
        # Branch on the most constrained uncovered vertex (fewest available
        # triangles), except that the first triangle of a factor branches on
        # the lowest vertex so the cross-factor ordering cut applies early.
        first = not cycles
        best_v, best_count = -1, -1
        m = uncov
        while m:
            bit = m & -m
            x = bit.bit_length() - 1
            m ^= bit
            nb = adj[x] & uncov
            count = 0
            mm = nb
            while mm:
                bb = mm & -mm
                a = bb.bit_length() - 1
                mm ^= bb
                count += (adj[a] & nb & ~((2 << a) - 1)).bit_count()
            if count == 0:
                return False
            if best_count < 0 or count < best_count:
                best_v, best_count = x, count
        v0 = (uncov & -uncov).bit_length() - 1 if first else best_v
        nb0 = adj[v0] & uncov
        cand_a = nb0
        if first and prev_a >= 0:
            cand_a &= ~((2 << prev_a) - 1)
        while cand_a:
            bit_a = cand_a & -cand_a
            a = bit_a.bit_length() - 1
            cand_a ^= bit_a
            cand_b = adj[a] & nb0 & ~((2 << a) - 1)
            while cand_b:
                bit_b = cand_b & -cand_b
                b = bit_b.bit_length() - 1
                cand_b ^= bit_b
                tick()
                adj[v0] &= ~(bit_a | bit_b)
                adj[a] &= ~((1 << v0) | bit_b)
                adj[b] &= ~((1 << v0) | bit_a)
                cycles.append((v0, a, b))
                ok = next_cycle(fi, prev_a, uncov & ~((1 << v0) | bit_a | bit_b), cycles)
                cycles.pop()
                adj[v0] |= bit_a | bit_b
                adj[a] |= (1 << v0) | bit_b
                adj[b] |= (1 << v0) | bit_a
                if ok:
                    return True
        return False

    def next_path_cycle(fi: int, prev_a: int, uncov: int, cycles: list) -> bool:
        start = (uncov & -uncov).bit_length() - 1
        length = lengths[fi]
        first = not cycles
        path = [start]

        def extend(uncov_now: int) -> bool:
            tick()
            last = path[-1]
            if len(path) == length:
                if adj[last] >> start & 1 and path[1] < last:
                    adj[last] &= ~(1 << start)
                    adj[start] &= ~(1 << last)
                    ok = False
                    if uncov_now == 0 or degree_viable(uncov_now):
                        cycles.append(tuple(path))
                        ok = next_cycle(fi, prev_a, uncov_now, cycles)
                        cycles.pop()
                    adj[last] |= 1 << start
                    adj[start] |= 1 << last
                    return ok
                return False
            cand = adj[last] & uncov_now
            if first and len(path) == 1 and prev_a >= 0:
                cand &= ~((2 << prev_a) - 1)
            while cand:
                bit = cand & -cand
                w = bit.bit_length() - 1
                cand ^= bit
                adj[last] &= ~bit
                adj[w] &= ~(1 << last)
                path.append(w)
                if extend(uncov_now & ~bit):
                    return True
                path.pop()
                adj[last] |= bit
                adj[w] |= 1 << last
            return False

        return extend(uncov & ~(1 << start))

    # Pin (part of) the first factor when the pristine graph is symmetric
    # enough that the pin is without loss of generality.
    pin = _canonical_first_factor(graph, lengths[0]) if k and adj_override is None else None
    try:
        if pin is not None:
            complete_factor, cycles = pin
            covered = 0
            for cyc in cycles:
                for t in range(len(cyc)):
                    a, b = cyc[t], cyc[(t + 1) % len(cyc)]
                    if not adj[a] >> b & 1:
                        raise ParameterError("canonical first factor not available")
                    adj[a] &= ~(1 << b)
                    adj[b] &= ~(1 << a)
                for x in cyc:
                    covered |= 1 << x
            if complete_factor:
                factors.append(cycles)
                a0 = cycles[0][1]
                found = factor_start(1, a0 if k > 1 and lengths[1] == lengths[0] else -1)
                factors.pop()
            else:
                found = next_cycle(0, -1, full & ~covered, list(cycles))
        else:
            found = factor_start(0, -1)
    except _StopSearch:
        return None, BUDGET_EXHAUSTED, nodes
    if not found:
        return None, SEARCH_EXHAUSTED, nodes
    return solution, leftover, nodes


def search_oracle(
    graph: GraphSpec,
    m: int,
    n: int,
    r: int,
    s: int,
    budget: SearchBudget = DEFAULT_BUDGET,
):
    """Find a decomposition of ``graph`` into r C_m-factors and s C_n-factors.

    Deterministic: identical inputs yield the identical decomposition
    (the first leaf in the fixed branch order).  Returns the verified
    :class:`Decomposition`, or :class:`NotFound` whose reason separates
    a fully-exhausted search (a nonexistence certificate) from running
    out of budget.
    """
    v = graph.v
    if m < 3 or n < 3 or r < 0 or s < 0:
        raise ParameterError("need m,n >= 3 and r,s >= 0")
    if r > 0 and v % m != 0:
        raise ParameterError(f"{m}-cycle factors need {m} | {v}")
    if s > 0 and v % n != 0:
        raise ParameterError(f"{n}-cycle factors need {n} | {v}")
    if graph.kind == COMPLETE:
        expected = (v - 1) // 2 if v % 2 else None
        if expected is None:
            raise ParameterError("complete graph with even v has no 2-factorization; use minusF")
    elif graph.kind == MINUS_F:
        expected = (v - 2) // 2
    else:
        degree = graph.h * (graph.u - 1)
        if degree % 2 != 0:
            raise ParameterError("equipartite degree must be even")
        expected = degree // 2
    if r + s != expected:
        raise ParameterError(f"need r+s={expected} factors, got {r + s}")

    # Short cycles are searched first: the last factor of the longest
    # length then sits on an exactly 2-regular remainder, where the cycle
    # walk is forced, and triangle classes get the strongest first-factor
    # pin on the pristine graph.
    if m == n:
        lengths = [m] * (r + s)
        tags = [M_TAG] * r + [N_TAG] * s
    else:
        small, big = min(m, n), max(m, n)
        small_count = r if small == m else s
        big_count = r + s - small_count
        lengths = [small] * small_count + [big] * big_count
        small_tag = M_TAG if small == m else N_TAG
        big_tag = N_TAG if small_tag == M_TAG else M_TAG
        tags = [small_tag] * small_count + [big_tag] * big_count

    factors, extra, _nodes = _search_two_factorization(
        graph, lengths, graph.kind == MINUS_F, budget
    )
    if factors is None:
        reason = extra
        return NotFound(reason, f"{graph.kind} v={v} m={m} n={n} r={r} s={s}")
    tagged = [
        (tag, TwoFactor(tuple(Cycle(c) for c in cycles), length, v))
        for tag, length, cycles in zip(tags, lengths, factors)
    ]
    one_factor = OneFactor(tuple(extra)) if graph.kind == MINUS_F else None
    d = Decomposition.build(graph, m, n, tagged, one_factor)
    report = verify(d)
    if not report.ok:
        raise AssertionError(f"oracle produced an invalid decomposition: {report.violation}")
    return d


def decomposition_to_rgdd(d: Decomposition) -> Rgdd:
    """Read a verified all-triangle equipartite factorization as a 3-RGDD."""
    g = d.graph
    if g.kind != EQUIPARTITE:
        raise ParameterError("only equipartite factorizations give GDDs")
    groups = tuple(
        tuple(range(gi * g.h, (gi + 1) * g.h)) for gi in range(g.u)
    )
    classes = tuple(
        tuple(tuple(sorted(c.vertices)) for c in factor.cycles) for factor in d.factors
    )
    rgdd = Rgdd(g.h, g.u, groups, classes)
    rgdd.validate()
    return rgdd


# ---------------------------------------------------------------------------
# The cached catalog
# ---------------------------------------------------------------------------


def default_cache_root() -> Path:
    env = os.environ.get("HWP_CACHE")
    if env:
        return Path(env)
    return Path.home() / ".cache" / "hwp-engine"


class IngredientStore:
    """Single-writer, multi-reader on-disk cache over the search oracle.

    Successful searches are stored in the decomposition text format
    under a key-derived filename; keys proven impossible (by the cited
    existence theory, or by an exhausted search) are listed in
    ``infeasible.txt`` as ``key<TAB>clause`` lines.  Writes go through a
    temp file plus atomic rename.
    """

    def __init__(self, root: Path | None = None):
        self.root = Path(root) if root is not None else default_cache_root()

    def _infeasible_path(self) -> Path:
        return self.root / "infeasible.txt"

    def _load_infeasible(self) -> dict[str, str]:
        path = self._infeasible_path()
        if not path.exists():
            return {}
        out = {}
        for line in path.read_text(encoding="utf-8").splitlines():
            if "\t" in line:
                key, clause = line.split("\t", 1)
                out[key] = clause
        return out

    def _record_infeasible(self, key: IngredientKey, clause: str) -> None:
        index = self._load_infeasible()
        if key.filename() in index:
            return
        index[key.filename()] = clause
        self.root.mkdir(parents=True, exist_ok=True)
        tmp = self._infeasible_path().with_suffix(".tmp")
        tmp.write_text(
            "".join(f"{k}\t{v}\n" for k, v in sorted(index.items())), encoding="utf-8"
        )
        tmp.replace(self._infeasible_path())

    def _store(self, key: IngredientKey, d: Decomposition) -> None:
        self.root.mkdir(parents=True, exist_ok=True)
        path = self.root / key.filename()
        tmp = path.with_suffix(".tmp")
        tmp.write_text(fileformat.serialize(d), encoding="utf-8")
        tmp.replace(path)

    def _load(self, key: IngredientKey) -> Decomposition | None:
        path = self.root / key.filename()
        if not path.exists():
            return None
        try:
            d = fileformat.parse(path.read_text(encoding="utf-8"))
        except ValueError:
            return None
        return d if verify(d).ok else None

    def _search_for_key(self, key: IngredientKey, budget: SearchBudget):
        if key.kind == "kts":
            (v,) = key.params
            return search_oracle(GraphSpec.complete(v), 3, 3, (v - 1) // 2, 0, budget)
        if key.kind == "rgdd3":
            h, u = key.params
            count = h * (u - 1) // 2
            return search_oracle(GraphSpec.equipartite(h, u), 3, 3, count, 0, budget)
        if key.kind == "equip":
            h, u, m = key.params
            count = h * (u - 1) // 2
            graph = GraphSpec.equipartite(h, u)
            if m == 3:
                return search_oracle(graph, 3, 3, count, 0, budget)
            return search_oracle(graph, 3, m, 0, count, budget)
        v, m, n, r, s, mf = key.params
        graph = (
            GraphSpec.complete_minus_one_factor(v) if mf else GraphSpec.complete(v)
        )
        return search_oracle(graph, m, n, r, s, budget)

    def get(self, key: IngredientKey, budget: SearchBudget = DEFAULT_BUDGET):
        """Fetch the design for ``key``: cache, else search, else NotFound."""
        clause = key_infeasible(key)
        if clause is not None:
            return NotFound(INFEASIBLE, clause)
        recorded = self._load_infeasible().get(key.filename())
        if recorded is not None:
            return NotFound(INFEASIBLE, recorded)
        cached = self._load(key)
        if cached is not None:
            return self._adapt(key, cached)
        result = self._search_for_key(key, budget)
        if isinstance(result, NotFound):
            if result.reason == SEARCH_EXHAUSTED:
                self._record_infeasible(key, f"exhaustive search: no {key}")
            return NotFound(result.reason, f"{key}: {result.detail}")
        self._store(key, result)
        return self._adapt(key, result)

    def _adapt(self, key: IngredientKey, d: Decomposition):
        if key.kind == "rgdd3":
            return decomposition_to_rgdd(d)
        return d

    def rgdd3(self, h: int, u: int, budget: SearchBudget = DEFAULT_BUDGET):
        """A verified 3-RGDD(h^u), via the resolvable triangle factorization."""
        return self.get(IngredientKey.rgdd3(h, u), budget)
