"""Difference-method 2-factorizations of K_{(x:3)} and K_{(4x:3)}.

Everything here is built from modular differences.  Label the three
parts of K_{(x:3)} as G0, G1, G2 and say an edge from (a1,b1) to (a2,b2)
has difference b2-b1 (mod x) read along the part order 0->1, 1->2, 2->0.

Odd x.  The triangle factor with parameter i takes differences
(2i, -i, -i), giving triangles {(0,k),(1,k+2i),(2,k+i)}.  Replacing the
G2->G0 difference by -j gives a 2-regular spanning subgraph with exactly
gcd(x, i-j) cycles; when gcd(x, i-j) = 1 it is a single Hamilton cycle.
Taking the full difference family i = 0..x-1 tiles every difference
between every pair of parts exactly once, so any permutation of the
G2->G0 difference assignments still decomposes the graph.  A permutation
with x-s fixed points and coprime displacements on the rest therefore
yields s Hamilton cycles and x-s triangle factors.

Even x = 2*xbar with xbar odd.  A fixed table of four triangle factors
of K_{(4:3)} plays the role of the differences; swapping the G0-G2 edge
sets between two of them produces C6-factors.  Blowing each vertex up by
weight xbar and decomposing every blown triangle with the odd-x family
lifts this to K_{(4xbar:3)}: a pair permutation on (table index, odd
index) with coprime index displacement and distinct table images yields
C_{6xbar}-factors, the fixed pairs staying triangle factors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .core import (
    Cycle,
    Decomposition,
    GraphSpec,
    M_TAG,
    N_TAG,
    TwoFactor,
    verify,
)


class ParameterError(ValueError):
    """A construction was asked for parameters outside its domain."""


class ConstructionBug(AssertionError):
    """An internally-built decomposition failed verification."""


def _verified(d: Decomposition) -> Decomposition:
    report = verify(d)
    if not report.ok:
        raise ConstructionBug(report.violation)
    return d


# ---------------------------------------------------------------------------
# Odd part size
# ---------------------------------------------------------------------------


def _require_odd(x: int) -> None:
    if x < 1 or x % 2 == 0:
        raise ParameterError(f"part size must be odd and positive, got {x}")


def triangle_factor(x: int, i: int) -> TwoFactor:
    """Triangle factor of K_{(x:3)} from differences (2i, -i, -i), x odd."""
    _require_odd(x)
    if not 0 <= i < x:
        raise ParameterError(f"difference index {i} out of range [0,{x})")
    cycles = tuple(
        Cycle((k, x + (k + 2 * i) % x, 2 * x + (k + i) % x)) for k in range(x)
    )
    return TwoFactor(cycles, 3, 3 * x)


def difference_two_factor(x: int, i: int, j: int) -> TwoFactor:
    """2-factor of K_{(x:3)} from differences (2i, -i, -j), x odd.

    Has exactly gcd(x, i-j) cycles of length 3x/gcd(x, i-j); a single
    Hamilton cycle when gcd(x, i-j) = 1, and the plain triangle factor
    when j = i.
    """
    _require_odd(x)
    if not (0 <= i < x and 0 <= j < x):
        raise ParameterError(f"difference indices ({i},{j}) out of range [0,{x})")
    cycles = []
    seen = [False] * x
    for k0 in range(x):
        if seen[k0]:
            continue
        path = []
        k = k0
        while not seen[k]:
            seen[k] = True
            path.extend((k, x + (k + 2 * i) % x, 2 * x + (k + i) % x))
            k = (k + i - j) % x
        cycles.append(Cycle(tuple(path)))
    length = len(cycles[0])
    return TwoFactor(tuple(cycles), length, 3 * x)


@dataclass(frozen=True)
class FixedPointMap:
    """A permutation whose non-fixed displacements make Hamilton factors.

    In single-index mode the domain is Z_x and every non-fixed i must
    satisfy gcd(x, i - map(i)) = 1.  In pair mode the domain is
    Z_4 x Z_xbar, flattened as alpha*xbar + i, and every moved pair
    (alpha,i) -> (beta,j) needs alpha != beta and gcd(xbar, i-j) = 1.
    ``origin`` records whether the map came from the closed-form
    piecewise rule or from the fallback search.
    """

    mapping: tuple[int, ...]
    fixed_count: int
    index_size: int
    alpha_size: int = 1
    origin: str = "piecewise"

    @property
    def domain_size(self) -> int:
        return self.alpha_size * self.index_size

    def is_fixed(self, p: int) -> bool:
        return self.mapping[p] == p

    def validate(self) -> None:
        dom = self.domain_size
        if sorted(self.mapping) != list(range(dom)):
            raise ParameterError("mapping is not a permutation")
        fixed = sum(1 for p in range(dom) if self.mapping[p] == p)
        if fixed != self.fixed_count:
            raise ParameterError(
                f"declared {self.fixed_count} fixed points, found {fixed}"
            )
        for p in range(dom):
            q = self.mapping[p]
            if p == q:
                continue
            a, i = divmod(p, self.index_size)
            b, j = divmod(q, self.index_size)
            if self.alpha_size > 1 and a == b:
                raise ParameterError(f"moved pair keeps first coordinate: {p}->{q}")
            if math.gcd(self.index_size, (i - j) % self.index_size) != 1:
                raise ParameterError(
                    f"displacement {i}->{j} not coprime with {self.index_size}"
                )


def _piecewise_phi(i: int, s: int) -> int:
    # First matching case wins; the s=0 caller never reaches here.
    if i == 1:
        return 0
    if i % 2 == 0 and 0 <= i <= s - 3:
        return i + 2
    if i % 2 == 1 and 3 <= i <= s - 1:
        return i - 2
    if i % 2 == 0 and i == s - 1:
        return s - 2
    if i % 2 == 0 and i == s - 2:
        return s - 1
    if s <= i:
        return i
    raise ConstructionBug(f"no case matched i={i}, s={s}")


def hamilton_permutation(x: int, s: int) -> FixedPointMap:
    """Permutation of Z_x with x-s fixed points and coprime displacements.

    ``s`` must lie in {0, 2, 3, ..., x}; s = 1 is impossible (a single
    moved element cannot be a permutation).  Non-fixed displacements all
    lie in {+-1, +-2}, coprime with any odd x.
    """
    _require_odd(x)
    if s == 1 or s < 0 or s > x:
        raise ParameterError(f"number of moved points must be in {{0,2,...,{x}}}")
    if s == 0:
        mapping = tuple(range(x))
    else:
        mapping = tuple(_piecewise_phi(i, s) for i in range(x))
    fp = FixedPointMap(mapping, x - s, x)
    fp.validate()
    return fp


def decompose_tripartite_odd(x: int, s: int) -> Decomposition:
    """K_{(x:3)} into s Hamilton cycles and x-s triangle factors, x odd."""
    phi = hamilton_permutation(x, s)
    tagged = []
    for i in range(x):
        factor = difference_two_factor(x, i, phi.mapping[i])
        tagged.append((M_TAG if phi.is_fixed(i) else N_TAG, factor))
    return _verified(
        Decomposition.build(GraphSpec.equipartite(x, 3), 3, 3 * x, tagged)
    )


# ---------------------------------------------------------------------------
# Even part size: weight-xbar blow-ups of a fixed K_{(4:3)} table
# ---------------------------------------------------------------------------

# Four triangle factors that together tile K_{(4:3)}.  Entry (b0, b1, b2)
# is the triangle through (G0,b0), (G1,b1), (G2,b2); the G0-G2 edge is the
# one that gets exchanged between tables.
TRIANGLE_TABLE_K43 = (
    ((0, 0, 0), (1, 3, 2), (2, 1, 3), (3, 2, 1)),
    ((1, 1, 1), (0, 2, 3), (2, 3, 0), (3, 0, 2)),
    ((2, 2, 2), (1, 0, 3), (0, 3, 1), (3, 1, 0)),
    ((3, 3, 3), (1, 2, 0), (2, 0, 1), (0, 1, 2)),
)


def _require_table_index(alpha: int) -> None:
    if not 0 <= alpha < 4:
        raise ParameterError(f"table index {alpha} out of range [0,4)")


def triangle_factor_k43(alpha: int) -> TwoFactor:
    """The alpha-th triangle factor of the fixed K_{(4:3)} table."""
    _require_table_index(alpha)
    cycles = tuple(
        Cycle((b0, 4 + b1, 8 + b2)) for b0, b1, b2 in TRIANGLE_TABLE_K43[alpha]
    )
    return TwoFactor(cycles, 3, 12)


def _cycles_from_edges(edges) -> tuple[Cycle, ...]:
    """Assemble a 2-regular edge list into cycles (deterministic walk)."""
    seen_edges: set[tuple[int, int]] = set()
    adjacency: dict[int, list[int]] = {}
    for a, b in edges:
        key = (a, b) if a < b else (b, a)
        if a == b or key in seen_edges:
            raise ConstructionBug(f"repeated or loop edge ({a},{b})")
        seen_edges.add(key)
        adjacency.setdefault(a, []).append(b)
        adjacency.setdefault(b, []).append(a)
    for v, nbrs in adjacency.items():
        if len(nbrs) != 2:
            raise ConstructionBug(f"vertex {v} has degree {len(nbrs)}, expected 2")
        nbrs.sort()
    cycles = []
    visited: set[int] = set()
    for start in sorted(adjacency):
        if start in visited:
            continue
        path = [start]
        visited.add(start)
        previous, current = None, start
        while True:
            a, b = adjacency[current]
            nxt = b if a == previous else a
            if nxt == start:
                break
            path.append(nxt)
            visited.add(nxt)
            previous, current = current, nxt
        cycles.append(Cycle(tuple(path)))
    return tuple(cycles)


def hexagon_factor_k43(alpha: int, beta: int) -> TwoFactor:
    """Table factor alpha with its G0-G2 edges replaced by table beta's.

    Equals the plain triangle factor when alpha = beta; a C6-factor (two
    hexagons) otherwise.
    """
    _require_table_index(alpha)
    _require_table_index(beta)
    edges = []
    for b0, b1, b2 in TRIANGLE_TABLE_K43[alpha]:
        edges.append((b0, 4 + b1))
        edges.append((4 + b1, 8 + b2))
    for b0, b1, b2 in TRIANGLE_TABLE_K43[beta]:
        edges.append((b0, 8 + b2))
    cycles = _cycles_from_edges(edges)
    return TwoFactor(cycles, len(cycles[0]), 12)


# G0-G2 exchange patterns realizing each legal hexagon count.
_K43_EXCHANGE = {
    0: (0, 1, 2, 3),
    2: (1, 0, 2, 3),
    3: (1, 2, 0, 3),
    4: (1, 2, 3, 0),
}


def decompose_k43(s: int) -> Decomposition:
    """K_{(4:3)} into s C6-factors and 4-s triangle factors, s in {0,2,3,4}."""
    if s not in _K43_EXCHANGE:
        raise ParameterError(f"hexagon count must be in {{0,2,3,4}}, got {s}")
    pattern = _K43_EXCHANGE[s]
    tagged = []
    for alpha, beta in enumerate(pattern):
        factor = hexagon_factor_k43(alpha, beta)
        tagged.append((M_TAG if alpha == beta else N_TAG, factor))
    return _verified(Decomposition.build(GraphSpec.equipartite(4, 3), 3, 6, tagged))


def _blown_flat(part: int, b: int, w: int, xbar: int) -> int:
    return part * 4 * xbar + b * xbar + w


def _require_blown_args(xbar: int, alpha: int, i: int) -> None:
    _require_odd(xbar)
    _require_table_index(alpha)
    if not 0 <= i < xbar:
        raise ParameterError(f"odd index {i} out of range [0,{xbar})")


def blown_triangle_factor(xbar: int, alpha: int, i: int) -> TwoFactor:
    """Triangle factor of K_{(4xbar:3)}: table factor alpha blown up by
    weight xbar, each blown triangle decomposed with odd parameter i."""
    _require_blown_args(xbar, alpha, i)
    cycles = []
    for b0, b1, b2 in TRIANGLE_TABLE_K43[alpha]:
        for k in range(xbar):
            cycles.append(
                Cycle(
                    (
                        _blown_flat(0, b0, k, xbar),
                        _blown_flat(1, b1, (k + 2 * i) % xbar, xbar),
                        _blown_flat(2, b2, (k + i) % xbar, xbar),
                    )
                )
            )
    return TwoFactor(tuple(cycles), 3, 12 * xbar)


def blown_two_factor(
    xbar: int, a: tuple[int, int], b: tuple[int, int]
) -> TwoFactor:
    """Blown factor for pair a with its G0-G2 edges taken from pair b.

    For a = (alpha,i), b = (beta,j): a triangle factor when a = b, and a
    C_{6xbar}-factor when alpha != beta and gcd(xbar, i-j) = 1 (cycle
    lengths follow lcm(6, 3xbar) through the two product coordinates).
    """
    alpha, i = a
    beta, j = b
    _require_blown_args(xbar, alpha, i)
    _require_blown_args(xbar, beta, j)
    edges = []
    for b0, b1, b2 in TRIANGLE_TABLE_K43[alpha]:
        for k in range(xbar):
            g0 = _blown_flat(0, b0, k, xbar)
            g1 = _blown_flat(1, b1, (k + 2 * i) % xbar, xbar)
            g2 = _blown_flat(2, b2, (k + i) % xbar, xbar)
            edges.append((g0, g1))
            edges.append((g1, g2))
    for c0, c1, c2 in TRIANGLE_TABLE_K43[beta]:
        for k in range(xbar):
            edges.append(
                (_blown_flat(0, c0, k, xbar), _blown_flat(2, c2, (k + j) % xbar, xbar))
            )
    cycles = _cycles_from_edges(edges)
    return TwoFactor(cycles, len(cycles[0]), 12 * xbar)


def _split_moved_count(s: int, slots: int, allowed: list[int]) -> tuple[int, ...]:
    """Greedy largest-first split of s into ``slots`` values from ``allowed``.

    Feasibility of the remainder is tracked by a reachable-sum table, so
    a forbidden remainder of 1 never arises (the greedy value is lowered
    instead, matching the decrement-and-retry reading of the rule).
    """
    allowed = sorted(set(allowed))
    reachable = [{0}]
    for _ in range(slots):
        reachable.append({t + a for t in reachable[-1] for a in allowed})
    if s not in reachable[slots]:
        raise ParameterError(f"cannot split {s} into {slots} values from {allowed}")
    out = []
    remaining = s
    for slot in range(slots, 0, -1):
        pick = max(a for a in allowed if a <= remaining and remaining - a in reachable[slot - 1])
        out.append(pick)
        remaining -= pick
    return tuple(out)


# Pair permutations on Z_4 x Z_1: the table exchange patterns themselves.
_UNIT_PAIR_MAPS = {0: (0, 1, 2, 3), 2: (1, 0, 2, 3), 3: (1, 2, 0, 3), 4: (1, 2, 3, 0)}


def _pair_permutation_search(xbar: int, s: int) -> tuple[int, ...] | None:
    """Deterministic backtracking fallback: lexicographically least valid map."""
    dom = 4 * xbar
    mapping = [-1] * dom
    used = [False] * dom

    def ok(p: int, q: int) -> bool:
        if p == q:
            return True
        a, i = divmod(p, xbar)
        b, j = divmod(q, xbar)
        return a != b and math.gcd(xbar, (i - j) % xbar) == 1

    def place(p: int, moved_left: int, fixed_left: int) -> bool:
        if p == dom:
            return moved_left == 0 and fixed_left == 0
        for q in range(dom):
            if used[q] or not ok(p, q):
                continue
            if q == p and fixed_left == 0:
                continue
            if q != p and moved_left == 0:
                continue
            mapping[p] = q
            used[q] = True
            if place(p + 1, moved_left - (q != p), fixed_left - (q == p)):
                return True
            used[q] = False
        mapping[p] = -1
        return False

    if place(0, s, dom - s):
        return tuple(mapping)
    return None


def hamilton_pair_permutation(
    xbar: int, s: int, split: tuple[int, int, int, int] | None = None
) -> FixedPointMap:
    """Pair permutation on Z_4 x Z_xbar with 4*xbar - s fixed points.

    Moved pairs change both coordinates, with coprime index displacement.
    ``s`` splits across the four diagonals {(i+m, i)}; each diagonal gets
    the single-index permutation for its share.  Per-diagonal shares are
    allowed to reach xbar (not xbar - 1) so that sums up to 4*xbar are
    expressible; the result is validated, with a deterministic search
    fallback should validation ever fail.
    """
    _require_odd(xbar)
    if s == 1 or s < 0 or s > 4 * xbar:
        raise ParameterError(
            f"number of moved pairs must be in {{0,2,...,{4 * xbar}}}"
        )
    dom = 4 * xbar
    if xbar == 1:
        # The diagonal construction degenerates at weight 1 (each diagonal
        # is a single pair); use the table exchange patterns instead.
        fp = FixedPointMap(_UNIT_PAIR_MAPS[s] if s else (0, 1, 2, 3), 4 - s, 1, 4)
        fp.validate()
        return fp
    if split is None:
        split = _split_moved_count(s, 4, [0] + list(range(2, xbar + 1)))
    else:
        if len(split) != 4 or sum(split) != s:
            raise ParameterError(f"split {split} does not sum to {s}")
        for s_m in split:
            if s_m == 1 or s_m < 0 or s_m > xbar:
                raise ParameterError(f"per-diagonal share {s_m} not in {{0,2,...,{xbar}}}")
    mapping = [0] * dom
    for m in range(4):
        s_m = split[m]
        for i in range(xbar):
            fi = i if s_m == 0 else _piecewise_phi(i, s_m)
            alpha = (i + m) % 4
            beta = (fi + m) % 4
            mapping[alpha * xbar + i] = beta * xbar + fi
    fp = FixedPointMap(tuple(mapping), dom - s, xbar, 4)
    try:
        fp.validate()
        return fp
    except ParameterError:
        found = _pair_permutation_search(xbar, s)
        if found is None:
            raise ParameterError(
                f"no valid pair permutation with {s} moved pairs on Z_4 x Z_{xbar}"
            ) from None
        fp = FixedPointMap(found, dom - s, xbar, 4, origin="search")
        fp.validate()
        return fp


def decompose_k4x3(xbar: int, s: int) -> Decomposition:
    """K_{(4xbar:3)} into s C_{6xbar}-factors and 4xbar-s triangle factors."""
    psi = hamilton_pair_permutation(xbar, s)
    tagged = []
    for alpha in range(4):
        for i in range(xbar):
            p = alpha * xbar + i
            q = psi.mapping[p]
            factor = blown_two_factor(xbar, (alpha, i), divmod(q, xbar))
            tagged.append((M_TAG if p == q else N_TAG, factor))
    return _verified(
        Decomposition.build(GraphSpec.equipartite(4 * xbar, 3), 3, 6 * xbar, tagged)
    )
