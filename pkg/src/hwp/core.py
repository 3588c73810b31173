"""Shared design types and the exact edge-partition verifier.

The objects here model uniform 2-factorizations: a graph (complete K_v,
K_v minus a perfect matching, or complete equipartite K_{(h:u)}) is
partitioned into 2-factors whose cycles all have length m or all have
length n, plus an optional 1-factor when v is even.  Every construction
in this package funnels its output through :func:`verify`, which checks
the partition exactly (each edge covered once, every factor spanning and
uniform) rather than trusting the construction.

Conventions:
  * vertices are flat integer ids in ``[0, v)``;
  * an equipartite vertex (part ``a``, index ``b``) flattens to ``a*h + b``;
  * an edge is an unordered pair, normalized to ``(min, max)``;
  * cycles are stored in canonical rotation (lexicographically least
    among all rotations and reflections), which makes serialized output
    byte-stable.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

COMPLETE = "complete"
MINUS_F = "minusF"
EQUIPARTITE = "equipartite"


class StructuralError(ValueError):
    """Input is malformed (e.g. vertex id out of range).

    Distinct from a verification failure: a structurally broken object
    cannot even be checked, while a well-formed object may simply fail
    to be a decomposition.
    """


def _check_vertex_ids(ids, v: int, where: str) -> None:
    for x in ids:
        if not isinstance(x, int) or x < 0 or x >= v:
            raise StructuralError(f"{where}: vertex id {x} out of range [0,{v})")


@dataclass(frozen=True)
class GraphSpec:
    """The graph being decomposed.

    ``kind`` is one of ``complete`` (K_v), ``minusF`` (K_v minus a
    perfect matching; v even) or ``equipartite`` (K_{(h:u)} with u parts
    of size h and all cross-part edges).
    """

    kind: str
    v: int
    h: int | None = None
    u: int | None = None

    def __post_init__(self) -> None:
        if self.kind not in (COMPLETE, MINUS_F, EQUIPARTITE):
            raise ValueError(f"unknown graph kind {self.kind!r}")
        if self.v < 3:
            raise ValueError("need at least 3 vertices")
        if self.kind == MINUS_F and self.v % 2 != 0:
            raise ValueError("K_v minus a 1-factor needs even v")
        if self.kind == EQUIPARTITE:
            if self.h is None or self.u is None or self.h < 1 or self.u < 2:
                raise ValueError("equipartite graph needs h >= 1 and u >= 2")
            if self.v != self.h * self.u:
                raise ValueError("equipartite graph needs v = h*u")
        elif self.h is not None or self.u is not None:
            raise ValueError("h/u only apply to equipartite graphs")

    @classmethod
    def complete(cls, v: int) -> "GraphSpec":
        return cls(COMPLETE, v)

    @classmethod
    def complete_minus_one_factor(cls, v: int) -> "GraphSpec":
        return cls(MINUS_F, v)

    @classmethod
    def equipartite(cls, h: int, u: int) -> "GraphSpec":
        return cls(EQUIPARTITE, h * u, h, u)

    @property
    def edge_count(self) -> int:
        """Number of edges the 2-factors must cover (excludes the 1-factor)."""
        if self.kind == COMPLETE:
            return self.v * (self.v - 1) // 2
        if self.kind == MINUS_F:
            return self.v * (self.v - 2) // 2
        return self.h * self.h * self.u * (self.u - 1) // 2

    def part_of(self, vertex: int) -> int:
        if self.kind != EQUIPARTITE:
            raise ValueError("part_of only applies to equipartite graphs")
        return vertex // self.h

    def has_edge(self, a: int, b: int) -> bool:
        if a == b:
            return False
        if self.kind == EQUIPARTITE:
            return a // self.h != b // self.h
        return True

    def partition_edges(self) -> set[tuple[int, int]]:
        """Edge set the factors plus the optional 1-factor must tile.

        For ``minusF`` this is all of E(K_v): the removed matching is
        part of the decomposition record and is checked together with
        the 2-factors.
        """
        if self.kind == EQUIPARTITE:
            return {
                (a, b)
                for a, b in combinations(range(self.v), 2)
                if a // self.h != b // self.h
            }
        return set(combinations(range(self.v), 2))


@dataclass(frozen=True)
class StructuredVertex:
    """A vertex of a layered product construction.

    ``coords`` is an ordered list of (layer size, index) pairs, first
    coordinate most significant; ``flat`` is its mixed-radix value.  For
    K_{(x:3)} the vertex (part a, index b) has coords ((3,a),(x,b)) and
    flat a*x + b.
    """

    coords: tuple[tuple[int, int], ...]

    def __post_init__(self) -> None:
        for size, idx in self.coords:
            if size < 1 or idx < 0 or idx >= size:
                raise ValueError(f"coordinate {idx} out of range for layer size {size}")

    @property
    def flat(self) -> int:
        value = 0
        for size, idx in self.coords:
            value = value * size + idx
        return value

    @classmethod
    def from_flat(cls, sizes: tuple[int, ...], flat: int) -> "StructuredVertex":
        total = 1
        for size in sizes:
            total *= size
        if flat < 0 or flat >= total:
            raise ValueError(f"flat id {flat} out of range [0,{total})")
        idxs = []
        for size in reversed(sizes):
            idxs.append(flat % size)
            flat //= size
        return cls(tuple(zip(sizes, reversed(idxs))))


def canonical_cycle(vertices) -> tuple[int, ...]:
    """Lexicographically least rotation/reflection of a cyclic sequence."""
    seq = tuple(vertices)
    k = len(seq)
    best = None
    for start in range(k):
        for step in (1, -1):
            cand = tuple(seq[(start + step * t) % k] for t in range(k))
            if best is None or cand < best:
                best = cand
    return best


@dataclass(frozen=True)
class Cycle:
    """A cycle given by its vertex sequence, stored in canonical rotation.

    Construction only normalizes; semantic validity (distinct vertices)
    is the verifier's job so that corrupted inputs are reported as
    verification failures, not crashes.
    """

    vertices: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.vertices) < 3:
            raise ValueError("cycles have length >= 3")
        object.__setattr__(self, "vertices", canonical_cycle(self.vertices))

    def __len__(self) -> int:
        return len(self.vertices)

    def edges(self):
        k = len(self.vertices)
        for t in range(k):
            a, b = self.vertices[t], self.vertices[(t + 1) % k]
            yield (a, b) if a < b else (b, a)


@dataclass(frozen=True)
class TwoFactor:
    """A spanning set of disjoint cycles of one length over ``span`` vertices."""

    cycles: tuple[Cycle, ...]
    cycle_length: int
    span: int

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "cycles", tuple(sorted(self.cycles, key=lambda c: c.vertices))
        )

    def vertices(self):
        for cycle in self.cycles:
            yield from cycle.vertices

    def edges(self):
        for cycle in self.cycles:
            yield from cycle.edges()


@dataclass(frozen=True)
class OneFactor:
    """A perfect matching, stored as sorted normalized pairs."""

    edges: tuple[tuple[int, int], ...]

    def __post_init__(self) -> None:
        normalized = tuple(sorted((a, b) if a < b else (b, a) for a, b in self.edges))
        object.__setattr__(self, "edges", normalized)


M_TAG = "m"
N_TAG = "n"


@dataclass(frozen=True)
class Decomposition:
    """A graph plus an ordered list of tagged uniform 2-factors.

    ``tags[i]`` says whether ``factors[i]`` is an m-type (C_m-factor) or
    n-type (C_n-factor); ``r``/``s`` are the declared counts.  Nothing is
    validated here beyond shape: :func:`verify` certifies the invariants.
    """

    graph: GraphSpec
    m: int
    n: int
    factors: tuple[TwoFactor, ...]
    tags: tuple[str, ...]
    one_factor: OneFactor | None
    r: int
    s: int

    def __post_init__(self) -> None:
        if len(self.factors) != len(self.tags):
            raise ValueError("factors and tags must align")
        for tag in self.tags:
            if tag not in (M_TAG, N_TAG):
                raise ValueError(f"unknown factor tag {tag!r}")

    @classmethod
    def build(cls, graph, m, n, tagged_factors, one_factor=None) -> "Decomposition":
        """Assemble from (tag, factor) pairs, deriving r and s from the tags."""
        factors = tuple(f for _, f in tagged_factors)
        tags = tuple(t for t, _ in tagged_factors)
        return cls(
            graph=graph,
            m=m,
            n=n,
            factors=factors,
            tags=tags,
            one_factor=one_factor,
            r=sum(1 for t in tags if t == M_TAG),
            s=sum(1 for t in tags if t == N_TAG),
        )


@dataclass(frozen=True)
class Rgdd:
    """A resolvable group divisible design with block size 3 and lambda=1.

    ``groups`` partition [0, h*u) into u groups of size h; each parallel
    class is a tuple of h*u/3 transverse triples covering every point.
    """

    h: int
    u: int
    groups: tuple[tuple[int, ...], ...]
    classes: tuple[tuple[tuple[int, int, int], ...], ...]

    def validate(self) -> None:
        points = self.h * self.u
        if sorted(p for g in self.groups for p in g) != list(range(points)):
            raise ValueError("groups do not partition the point set")
        if any(len(g) != self.h for g in self.groups) or len(self.groups) != self.u:
            raise ValueError("groups have wrong shape")
        if len(self.classes) != self.h * (self.u - 1) // 2:
            raise ValueError(
                f"expected {self.h * (self.u - 1) // 2} parallel classes,"
                f" got {len(self.classes)}"
            )
        group_of = {}
        for gi, g in enumerate(self.groups):
            for p in g:
                group_of[p] = gi
        seen_pairs = set()
        for cls_idx, cls in enumerate(self.classes):
            covered = sorted(p for triple in cls for p in triple)
            if covered != list(range(points)):
                raise ValueError(f"class {cls_idx} is not a partition of the points")
            for triple in cls:
                if len({group_of[p] for p in triple}) != 3:
                    raise ValueError(f"block {triple} meets a group twice")
                for a, b in combinations(sorted(triple), 2):
                    if (a, b) in seen_pairs:
                        raise ValueError(f"transverse pair ({a},{b}) covered twice")
                    seen_pairs.add((a, b))
        expected = points * (points - self.h) // 2
        if len(seen_pairs) != expected:
            raise ValueError("transverse pairs not all covered")


@dataclass(frozen=True)
class VerificationReport:
    ok: bool
    violation: str | None
    factor_count: int
    edges_covered: int
    edges_expected: int

    def __bool__(self) -> bool:
        return self.ok


def _fail(violation: str, factors: int, covered: int, expected: int) -> VerificationReport:
    return VerificationReport(False, violation, factors, covered, expected)


def verify(d: Decomposition) -> VerificationReport:
    """Certify that ``d`` is exactly what it claims to be.

    Pure and total for structurally well-formed input; raises
    :class:`StructuralError` for out-of-range vertex ids.  On failure the
    report carries the first violation found, in a fixed check order:
    per-factor shape, declared counts, 1-factor shape, then the exact
    edge partition (duplicate / non-edge / missing).
    """
    g = d.graph
    v = g.v
    for i, f in enumerate(d.factors):
        _check_vertex_ids(f.vertices(), v, f"factor {i}")
    if d.one_factor is not None:
        _check_vertex_ids(
            (x for e in d.one_factor.edges for x in e), v, "one-factor"
        )

    expected = g.partition_edges()
    n_expected = len(expected)
    nfac = len(d.factors)

    for i, (f, tag) in enumerate(zip(d.factors, d.tags)):
        want = d.m if tag == M_TAG else d.n
        if f.cycle_length != want:
            return _fail(
                f"factor {i}: tag '{tag}' needs cycle length {want},"
                f" declared {f.cycle_length}",
                nfac, 0, n_expected,
            )
        if f.span != v:
            return _fail(f"factor {i}: span {f.span} != {v}", nfac, 0, n_expected)
        covered = [0] * v
        for cycle in f.cycles:
            if len(cycle) != f.cycle_length:
                return _fail(
                    f"factor {i}: cycle of length {len(cycle)} !="
                    f" {f.cycle_length}",
                    nfac, 0, n_expected,
                )
            for x in cycle.vertices:
                covered[x] += 1
        for x, count in enumerate(covered):
            if count > 1:
                return _fail(
                    f"factor {i}: vertex {x} covered {count} times", nfac, 0, n_expected
                )
            if count == 0:
                return _fail(f"factor {i}: vertex {x} not covered", nfac, 0, n_expected)

    r_actual = sum(1 for t in d.tags if t == M_TAG)
    s_actual = nfac - r_actual
    if (d.r, d.s) != (r_actual, s_actual):
        return _fail(
            f"declared (r,s)=({d.r},{d.s}) but tags give ({r_actual},{s_actual})",
            nfac, 0, n_expected,
        )

    if g.kind == MINUS_F and d.one_factor is None:
        return _fail("missing 1-factor for K_v minus a 1-factor", nfac, 0, n_expected)
    if g.kind != MINUS_F and d.one_factor is not None:
        return _fail(f"unexpected 1-factor on a {g.kind} graph", nfac, 0, n_expected)
    if d.one_factor is not None:
        covered = [0] * v
        for a, b in d.one_factor.edges:
            if a == b:
                return _fail(f"one-factor: self loop at {a}", nfac, 0, n_expected)
            covered[a] += 1
            covered[b] += 1
        for x, count in enumerate(covered):
            if count != 1:
                return _fail(
                    f"one-factor: vertex {x} covered {count} times",
                    nfac, 0, n_expected,
                )

    seen: set[tuple[int, int]] = set()
    for i, f in enumerate(d.factors):
        for e in f.edges():
            if e in seen:
                return _fail(
                    f"duplicate edge ({e[0]},{e[1]}) in factor {i}",
                    nfac, len(seen), n_expected,
                )
            if e not in expected:
                return _fail(
                    f"edge ({e[0]},{e[1]}) in factor {i} is not a graph edge",
                    nfac, len(seen), n_expected,
                )
            seen.add(e)
    if d.one_factor is not None:
        for e in d.one_factor.edges:
            if e in seen:
                return _fail(
                    f"duplicate edge ({e[0]},{e[1]}) in one-factor",
                    nfac, len(seen), n_expected,
                )
            if e not in expected:
                return _fail(
                    f"edge ({e[0]},{e[1]}) in one-factor is not a graph edge",
                    nfac, len(seen), n_expected,
                )
            seen.add(e)
    if len(seen) != n_expected:
        missing = min(expected - seen)
        return _fail(
            f"missing edge ({missing[0]},{missing[1]})", nfac, len(seen), n_expected
        )
    return VerificationReport(True, None, nfac, len(seen), n_expected)


def check_necessary(x: int, y: int, r: int, s: int) -> list[str]:
    """Violated necessary conditions for an (3,3x)-HWP(3xy; r, s); empty if none.

    With v = 3xy the divisibility clauses (3 | v when r > 0, 3x | v when
    s > 0) hold automatically, so the live condition is the factor count:
    r + s = (v-1)/2 for odd v, (v-2)/2 for even v.
    """
    if x < 1 or y < 1:
        return ["x and y must be positive"]
    if r < 0 or s < 0:
        return ["r and s must be non-negative"]
    v = 3 * x * y
    violations = []
    if v % 2 == 1:
        if r + s != (v - 1) // 2:
            violations.append(f"v={v} odd needs r+s=(v-1)/2={(v - 1) // 2}, got {r + s}")
    else:
        if r + s != (v - 2) // 2:
            violations.append(f"v={v} even needs r+s=(v-2)/2={(v - 2) // 2}, got {r + s}")
    if r > 0 and v % 3 != 0:
        violations.append("r>0 needs 3 | v")
    if s > 0 and v % (3 * x) != 0:
        violations.append("s>0 needs 3x | v")
    return violations
