"""Assembly of full-size decompositions from classes, groups and halves.

Three composition schemes turn small verified pieces into a
decomposition of K_v (or K_v minus a 1-factor) for v = 3xy:

  * weighting: blow each point of a resolvable group divisible design up
    by x.  Every parallel class contributes one decomposition of
    K_{(x:3)} per block (same shape across the class, factors unioned by
    index), the groups are filled with a complete-graph decomposition on
    h*x points, and per-group 1-factors union to the global one;
  * grouped weighting: as above, but the last parallel class receives a
    complete-graph decomposition on its 3x-point blocks (covering the
    within-point edges), so the groups only need the equipartite
    K_{(x:h)} decomposition;
  * doubling: two relabeled copies of a decomposition of K_{3x} minus a
    1-factor, index-paired (triangle factors pair to triangle factors,
    Hamilton cycles pair to C_{3x}-factors), plus a C_{3x}-factorization
    of the cross join;
  * part filling (y in {4,6}): y disjoint copies of a decomposition of
    K_{3x} minus a 1-factor, with the cross K_{(3x:y)} factorized into
    all triangles or all C_{3x}-cycles.

The planner maps a requested (x, y, r, s) to one of these schemes with a
deterministic split of s, or classifies the point as a proven exception
or an open case of the underlying theory.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import constructions
from .constructions import ParameterError
from .core import (
    Cycle,
    Decomposition,
    GraphSpec,
    M_TAG,
    MINUS_F,
    N_TAG,
    OneFactor,
    Rgdd,
    TwoFactor,
    check_necessary,
    verify,
)
from .ingredients import (
    DEFAULT_BUDGET,
    INFEASIBLE,
    IngredientKey,
    IngredientStore,
    NotFound,
    SearchBudget,
    _search_two_factorization,
    key_infeasible,
    search_oracle,
)

HAMMY_OPEN_X = frozenset({31, 37, 41, 43, 47, 51, 53, 59, 61, 67, 69, 71, 79, 83})

# Proven-impossible parameter points (hard exceptions, not open cases).
EXCEPTION_X3_S1 = "s=1 and x=3"
EXCEPTION_Y2_S0 = "y=2 and s=0"

# Possible exceptions of the concluding theory, in source order.  Each entry
# is (predicate over (x, y, s), bullet text).
OPEN_BULLETS: tuple = (
    (
        lambda x, y, s: s == 1 and y >= 3 and x in HAMMY_OPEN_X | {3},
        "s=1, y>=3, and x in {3,31,37,41,43,47,51,53,59,61,67,69,71,79,83}",
    ),
    (lambda x, y, s: s == 1 and x % 2 == 1 and y % 2 == 0, "s=1, x is odd and y is even"),
    (lambda x, y, s: s == 1 and x >= 6 and x % 12 == 2, "s=1, x>=6, x = 2 (mod 12)"),
    (
        lambda x, y, s: s == 1 and y >= 8 and y % 2 == 0 and x % 12 == 10,
        "s=1, y>=8 is even and x = 10 (mod 12)",
    ),
    (
        lambda x, y, s: s == 1 and x >= 3 and x % 2 == 1 and y % 2 == 0,
        "s=1, x>=3 is odd and y is even",
    ),
    (
        lambda x, y, s: 1 <= s <= x // 2 - 1 and x >= 16 and x % 12 == 4 and y % 2 == 0,
        "1<=s<=x/2-1, x>=16, x = 4 (mod 12), y is even",
    ),
    (
        lambda x, y, s: 1 <= s <= x // 2 - 1 and x >= 10 and x % 6 == 4 and y % 2 == 1,
        "1<=s<=x/2-1, x>=10, x = 4 (mod 6), y is odd",
    ),
    (lambda x, y, s: (s, x) in ((2, 12), (4, 12)), "(s,x) in {(2,12),(4,12)}"),
    (lambda x, y, s: s == 0 and x == 2 and y == 2, "s=0, x=2, y=2"),
    (lambda x, y, s: x == 2 and y in (4, 8), "x=2 and y in {4,8}"),
    (
        lambda x, y, s: x == 2 and y >= 3 and y % 2 == 1 and 3 <= s <= 3 * (y - 1) // 2,
        "s in {3,4,...,3(y-1)/2}, x=2 and y>=3 is odd",
    ),
    (lambda x, y, s: x not in (2, 4) and y in (2, 4, 6), "x not in {2,4} and y in {2,4,6}"),
    (lambda x, y, s: x == 4 and y in (2, 4), "x=4 and y in {2,4}"),
    (lambda x, y, s: x == 6 and y % 2 == 1, "x=6 and y odd"),
)


@dataclass(frozen=True)
class KnownException:
    """The requested point is proven impossible."""

    bullet: str


@dataclass(frozen=True)
class OpenCase:
    """The requested point is unresolved by the underlying theory."""

    bullet: str


@dataclass(frozen=True)
class Unsupported:
    """The direct small-y shapes do not reach this (r, s)."""

    detail: str


@dataclass(frozen=True)
class Plan:
    """Deterministic recipe realizing a requested (x, y, r, s).

    ``class_s`` lists the C_n-factor count taken per parallel class;
    ``s_beta`` is the group/last-class fill share; ``s_gamma`` the group
    decomposition share in the grouped scheme.  ``class_provider`` names
    how per-class K_{(x_weight:3)} decompositions are produced.
    """

    strategy: str  # weighting | weighting-grouped | doubling | parts | direct
    x: int
    y: int
    r: int
    s: int
    why: str = ""
    h: int = 0
    u: int = 0
    x_weight: int = 0
    class_provider: str = ""
    class_s: tuple[int, ...] = ()
    s_beta: int = 0
    s_gamma: int | None = None
    e1: int = 0
    ingredients: tuple[IngredientKey, ...] = ()


# ---------------------------------------------------------------------------
# Relabeling helpers
# ---------------------------------------------------------------------------


def _relabel_factor(factor: TwoFactor, mapping, span: int) -> tuple:
    return tuple(
        tuple(mapping(x) for x in cycle.vertices) for cycle in factor.cycles
    )


def _union_factors(parts: list[tuple], length: int, span: int) -> TwoFactor:
    cycles = tuple(Cycle(c) for part in parts for c in part)
    return TwoFactor(cycles, length, span)


def _retag(d: Decomposition, m: int, n: int) -> Decomposition:
    """Present a decomposition against the target pair (m, n).

    Factors keep their cycles; tags are reassigned by length.  Useful for
    single-length ingredients searched under a placeholder n.
    """
    tagged = []
    for factor in d.factors:
        if factor.cycle_length == m:
            tagged.append((M_TAG, factor))
        elif factor.cycle_length == n:
            tagged.append((N_TAG, factor))
        else:
            raise ParameterError(
                f"factor length {factor.cycle_length} fits neither {m} nor {n}"
            )
    return Decomposition.build(d.graph, m, n, tagged, d.one_factor)


def _verified(d: Decomposition) -> Decomposition:
    report = verify(d)
    if not report.ok:
        raise AssertionError(f"composed decomposition failed verification: {report.violation}")
    return d


# ---------------------------------------------------------------------------
# The weighting constructions
# ---------------------------------------------------------------------------


def compose_weighting(
    rgdd: Rgdd,
    x: int,
    class_decomps: list[Decomposition],
    group_fill: Decomposition,
) -> Decomposition:
    """Blow the design up by weight x; fill classes blockwise and groups wholesale.

    ``class_decomps[p]`` is a verified (C_m, C_n)-decomposition of
    K_{(x:3)} used on every block of parallel class p (point a, weight w
    maps to a*x + w, block parts in ascending point order).
    ``group_fill`` decomposes K_{h*x} (minus a 1-factor when h*x is
    even) and is placed on every group simultaneously; its factors union
    across groups, as do its 1-factors.
    """
    h, u = rgdd.h, rgdd.u
    v = h * u * x
    if len(class_decomps) != len(rgdd.classes):
        raise ParameterError(
            f"need {len(rgdd.classes)} class decompositions, got {len(class_decomps)}"
        )
    m = group_fill.m
    n = group_fill.n
    tagged = []
    for p, cdec in enumerate(class_decomps):
        if (cdec.m, cdec.n) != (m, n):
            raise ParameterError("class decompositions must share (m, n) with the fill")
        blocks = [tuple(sorted(block)) for block in rgdd.classes[p]]
        for tag, factor in zip(cdec.tags, cdec.factors):
            parts = []
            for block in blocks:
                mapping = lambda q, block=block: block[q // x] * x + q % x
                parts.append(_relabel_factor(factor, mapping, v))
            tagged.append((tag, _union_factors(parts, factor.cycle_length, v)))
    groups = [tuple(sorted(g)) for g in rgdd.groups]
    for tag, factor in zip(group_fill.tags, group_fill.factors):
        parts = []
        for group in groups:
            mapping = lambda q, group=group: group[q // x] * x + q % x
            parts.append(_relabel_factor(factor, mapping, v))
        tagged.append((tag, _union_factors(parts, factor.cycle_length, v)))
    one_factor = None
    graph = GraphSpec.complete(v)
    if group_fill.one_factor is not None:
        edges = []
        for group in groups:
            for a, b in group_fill.one_factor.edges:
                edges.append(
                    (group[a // x] * x + a % x, group[b // x] * x + b % x)
                )
        one_factor = OneFactor(tuple(edges))
        graph = GraphSpec.complete_minus_one_factor(v)
    return _verified(Decomposition.build(graph, m, n, tagged, one_factor))


def compose_weighting_grouped(
    rgdd: Rgdd,
    x: int,
    class_decomps: list[Decomposition],
    last_class_fill: Decomposition,
    group_decomp: Decomposition,
) -> Decomposition:
    """Weighting where the last class gets complete 3x-point fills.

    Classes 1..B-1 are filled blockwise with K_{(x:3)} decompositions;
    every block of the last class receives ``last_class_fill`` (a
    decomposition of K_{3x}, covering within-point edges, minus a
    1-factor when 3x is even); each group receives ``group_decomp`` (an
    equipartite K_{(x:h)} decomposition).
    """
    h, u = rgdd.h, rgdd.u
    v = h * u * x
    total_classes = len(rgdd.classes)
    if len(class_decomps) != total_classes - 1:
        raise ParameterError(
            f"need {total_classes - 1} class decompositions, got {len(class_decomps)}"
        )
    m = last_class_fill.m
    n = last_class_fill.n
    tagged = []
    for p, cdec in enumerate(class_decomps):
        if (cdec.m, cdec.n) != (m, n):
            raise ParameterError("class decompositions must share (m, n) with the fills")
        blocks = [tuple(sorted(block)) for block in rgdd.classes[p]]
        for tag, factor in zip(cdec.tags, cdec.factors):
            parts = []
            for block in blocks:
                mapping = lambda q, block=block: block[q // x] * x + q % x
                parts.append(_relabel_factor(factor, mapping, v))
            tagged.append((tag, _union_factors(parts, factor.cycle_length, v)))
    last_blocks = [tuple(sorted(block)) for block in rgdd.classes[-1]]
    for tag, factor in zip(last_class_fill.tags, last_class_fill.factors):
        parts = []
        for block in last_blocks:
            mapping = lambda q, block=block: block[q // x] * x + q % x
            parts.append(_relabel_factor(factor, mapping, v))
        tagged.append((tag, _union_factors(parts, factor.cycle_length, v)))
    groups = [tuple(sorted(g)) for g in rgdd.groups]
    for tag, factor in zip(group_decomp.tags, group_decomp.factors):
        parts = []
        for group in groups:
            mapping = lambda q, group=group: group[q // x] * x + q % x
            parts.append(_relabel_factor(factor, mapping, v))
        tagged.append((tag, _union_factors(parts, factor.cycle_length, v)))
    one_factor = None
    graph = GraphSpec.complete(v)
    if last_class_fill.one_factor is not None:
        edges = []
        for block in last_blocks:
            for a, b in last_class_fill.one_factor.edges:
                edges.append((block[a // x] * x + a % x, block[b // x] * x + b % x))
        one_factor = OneFactor(tuple(edges))
        graph = GraphSpec.complete_minus_one_factor(v)
    return _verified(Decomposition.build(graph, m, n, tagged, one_factor))


# ---------------------------------------------------------------------------
# Doubling and direct small-y assemblies
# ---------------------------------------------------------------------------


def _shift_factor(factor: TwoFactor, offset: int, span: int) -> tuple:
    return tuple(tuple(x + offset for x in c.vertices) for c in factor.cycles)


def double(
    half: Decomposition,
    store: IngredientStore | None = None,
    budget: SearchBudget = DEFAULT_BUDGET,
):
    """From K_{3x}-F (x even) into triangles and Hamilton cycles, build K_{6x}-F.

    Index-paired copies give the within-part factors; the cross join
    K_{(3x:2)} contributes 3x/2 more C_{3x}-factors.  For x = 2 the
    cross join alone has no C6-factorization (a known small exception),
    so the halves' matchings are folded into the cross search and a
    fresh cross matching is removed instead; the result still verifies
    against K_12 minus that matching.
    """
    store = store if store is not None else IngredientStore()
    g = half.graph
    if g.kind != MINUS_F:
        raise ParameterError("the half must decompose K_{3x} minus a 1-factor")
    vh = g.v
    x = vh // 3
    if vh % 3 != 0 or x % 2 != 0:
        raise ParameterError("doubling needs 3x points with x even")
    if half.n != vh:
        raise ParameterError("the half's long factors must be Hamilton cycles")
    report = verify(half)
    if not report.ok:
        raise ParameterError(f"half fails verification: {report.violation}")
    v = 2 * vh
    tagged = []
    for tag, factor in zip(half.tags, half.factors):
        left = _shift_factor(factor, 0, v)
        right = _shift_factor(factor, vh, v)
        tagged.append((tag, _union_factors([left, right], factor.cycle_length, v)))

    if x == 2:
        # Cross join plus the two half matchings, minus a fresh matching.
        adj = [0] * v
        def add(a, b):
            adj[a] |= 1 << b
            adj[b] |= 1 << a
        for a in range(vh):
            for b in range(vh, v):
                add(a, b)
        for a, b in half.one_factor.edges:
            add(a, b)
            add(a + vh, b + vh)
        factors, extra, _ = _search_two_factorization(
            GraphSpec.complete_minus_one_factor(v),
            [vh] * (vh // 2),
            True,
            budget,
            adj_override=adj,
        )
        if factors is None:
            return NotFound(extra, f"cross fill for doubling at x={x}")
        for cycles in factors:
            tagged.append(
                (N_TAG, TwoFactor(tuple(Cycle(c) for c in cycles), vh, v))
            )
        one_factor = OneFactor(tuple(extra))
    else:
        cross = store.get(
            IngredientKey.equipartite_factorization(vh, 2, vh), budget
        )
        if isinstance(cross, NotFound):
            return cross
        for factor in cross.factors:
            tagged.append((N_TAG, factor))
        edges = list(half.one_factor.edges) + [
            (a + vh, b + vh) for a, b in half.one_factor.edges
        ]
        one_factor = OneFactor(tuple(edges))
    return _verified(
        Decomposition.build(
            GraphSpec.complete_minus_one_factor(v), 3, vh, tagged, one_factor
        )
    )


def compose_parts(
    x: int,
    y: int,
    r: int,
    s: int,
    store: IngredientStore | None = None,
    budget: SearchBudget = DEFAULT_BUDGET,
    e1: int | None = None,
):
    """y disjoint fills of K_{3x}-F plus an all-triangle or all-C_{3x} cross.

    Reaches s = s1 and s = s1 + 3x(y-1)/2 for any decomposition of
    K_{3x}-F into r1 triangle factors and s1 Hamilton cycles.  ``e1``
    pins the cross type (1 = all C_{3x}); by default both are tried.
    """
    part = 3 * x
    cross_count = part * (y - 1) // 2
    for e1 in ((e1,) if e1 is not None else (0, 1)):
        s1 = s - e1 * cross_count
        r1 = r - (1 - e1) * cross_count
        if s1 < 0 or r1 < 0:
            continue
        key = IngredientKey.base_hwp(part, 3, part, r1, s1, True)
        if key_infeasible(key) is not None:
            continue
        store_ = store if store is not None else IngredientStore()
        fill = store_.get(key, budget)
        if isinstance(fill, NotFound):
            return fill
        cross_key = IngredientKey.equipartite_factorization(
            part, y, part if e1 else 3
        )
        cross = store_.get(cross_key, budget)
        if isinstance(cross, NotFound):
            return cross
        v = part * y
        tagged = []
        for tag, factor in zip(fill.tags, fill.factors):
            copies = [_shift_factor(factor, p * part, v) for p in range(y)]
            tagged.append((tag, _union_factors(copies, factor.cycle_length, v)))
        cross = _retag(cross, 3, part)
        for tag, factor in zip(cross.tags, cross.factors):
            tagged.append((tag, factor))
        edges = [
            (a + p * part, b + p * part)
            for p in range(y)
            for a, b in fill.one_factor.edges
        ]
        return _verified(
            Decomposition.build(
                GraphSpec.complete_minus_one_factor(v),
                3,
                part,
                tagged,
                OneFactor(tuple(edges)),
            )
        )
    return Unsupported(
        f"neither cross type reaches (r,s)=({r},{s}) for x={x}, y={y}"
    )


def small_y(
    x: int,
    y: int,
    r: int,
    s: int,
    store: IngredientStore | None = None,
    budget: SearchBudget = DEFAULT_BUDGET,
):
    """Direct constructions for even x and y in {2, 4, 6}.

    y = 2 doubles a decomposition of K_{3x}-F; y in {4, 6} uses the
    part-filling shape.  Requests outside the reachable (r, s) shapes
    come back as Unsupported.
    """
    if x % 2 != 0:
        raise ParameterError("the small-y shapes need x even")
    if y == 2:
        s1 = s - 3 * x // 2
        if s1 < 0:
            return Unsupported(f"doubling only reaches s >= {3 * x // 2}")
        key = IngredientKey.base_hwp(3 * x, 3, 3 * x, r, s1, True)
        clause = key_infeasible(key)
        if clause is not None:
            return NotFound(INFEASIBLE, f"no half {key}: {clause}")
        store_ = store if store is not None else IngredientStore()
        half = store_.get(key, budget)
        if isinstance(half, NotFound):
            return half
        return double(half, store_, budget)
    if y in (4, 6):
        return compose_parts(x, y, r, s, store, budget)
    raise ParameterError("direct shapes exist only for y in {2,4,6}")


# ---------------------------------------------------------------------------
# Existence status of the cited triangle-plus-Hamilton fills
# ---------------------------------------------------------------------------


HAMMY_OPEN_ODD_V = frozenset(
    {93, 111, 123, 129, 141, 153, 159, 177, 183, 201, 207, 213, 237, 249}
)


def triangle_hamilton_status(v: int, s: int) -> str:
    """Known status of decomposing K_v (K_v-F for even v) into s Hamilton
    cycles and the rest triangle factors: 'exists', 'open' or 'none'.

    Encodes the published summary for this family, including its open
    ranges, plus the settled 6- and 12-point base cases.
    """
    if v % 3 != 0:
        return "none"
    smax = (v - 1) // 2 if v % 2 else (v - 2) // 2
    if not 0 <= s <= smax:
        return "none"
    if v == 6:
        return "none" if s == 0 else "exists"
    if v == 12:
        return "none" if s == 0 else "exists"
    if s == 0:
        return "exists"  # v in {6,12} already handled
    if s == smax:
        return "exists"  # Hamilton decompositions have no exceptions here
    if v % 6 == 3:
        if s == 1:
            if v == 9:
                return "none"
            return "open" if v in HAMMY_OPEN_ODD_V else "exists"
        if v % 18 == 15 and (2 <= s <= (v - 3) // 6 or s == (v + 3) // 6 + 1):
            return "open"
        return "exists"
    if v % 6 == 0:
        if s == 1:
            return "open" if (v == 18 or v % 18 == 12 or v % 36 == 6) else "exists"
        if (v, s) in ((36, 2), (36, 4)):
            return "open"
        if v % 18 == 12 and 2 <= s <= v // 6 - 1:
            return "open"
        return "exists"
    return "none"  # odd v not divisible by 3-mod-6 pattern has no triangle factors


# ---------------------------------------------------------------------------
# The planner
# ---------------------------------------------------------------------------


def _split_or_none(target: int, slots: int, allowed) -> tuple[int, ...] | None:
    try:
        return constructions._split_moved_count(target, slots, list(allowed))
    except ParameterError:
        return None


def _class_allowed(provider: str, x_weight: int) -> list[int]:
    if provider == "odd":
        return [0] + list(range(2, x_weight + 1))
    if provider == "blown":
        return [0] + list(range(2, x_weight + 1))
    if provider == "equip":
        return [0, x_weight]
    if provider == "k23":
        return [1, 2]
    if provider == "unit":
        return [0]
    raise ParameterError(f"unknown class provider {provider!r}")


def _class_ingredient_keys(provider: str, x_weight: int, n: int, class_s) -> list[IngredientKey]:
    if provider != "equip":
        return []
    keys = []
    for s_p in sorted(set(class_s)):
        length = 3 if s_p == 0 else n
        key = IngredientKey.equipartite_factorization(x_weight, 3, length)
        if key not in keys:
            keys.append(key)
    return keys


def _try_weighting(
    x: int,
    y: int,
    r: int,
    s: int,
    *,
    h: int,
    u: int,
    x_weight: int,
    provider: str,
    n: int,
    beta_options,  # iterable of (s_beta, IngredientKey)
    gamma_options=None,  # iterable of (s_gamma, IngredientKey) for the grouped form
    why: str,
) -> Plan | None:
    grouped = gamma_options is not None
    slots = h * (u - 1) // 2 - (1 if grouped else 0)
    if slots < 0:
        return None
    allowed = _class_allowed(provider, x_weight)
    betas = sorted(beta_options, key=lambda t: t[0])
    gammas = sorted(gamma_options, key=lambda t: t[0]) if grouped else [(None, None)]
    for s_beta, beta_key in betas:
        for s_gamma, gamma_key in gammas:
            s_alpha = s - s_beta - (s_gamma or 0)
            if s_alpha < 0:
                continue
            split = _split_or_none(s_alpha, slots, allowed)
            if split is None:
                continue
            keys = [IngredientKey.rgdd3(h, u), beta_key]
            if gamma_key is not None:
                keys.append(gamma_key)
            keys.extend(_class_ingredient_keys(provider, x_weight, n, split))
            return Plan(
                strategy="weighting-grouped" if grouped else "weighting",
                x=x,
                y=y,
                r=r,
                s=s,
                why=why,
                h=h,
                u=u,
                x_weight=x_weight,
                class_provider=provider,
                class_s=split,
                s_beta=s_beta,
                s_gamma=s_gamma,
                ingredients=tuple(keys),
            )
    return None


def _odd_group_betas(x: int) -> list[tuple[int, IngredientKey]]:
    """Group fills of K_{3x} (x odd): all triangles, one Hamilton, or all Hamilton."""
    v = 3 * x
    smax = (v - 1) // 2
    out = []
    for s_b in (0, 1, smax):
        if triangle_hamilton_status(v, s_b) != "exists":
            continue
        key = IngredientKey.base_hwp(v, 3, v, smax - s_b, s_b, False)
        if key_infeasible(key) is None:
            out.append((s_b, key))
    return out


def _single_type_betas(v: int, n: int) -> list[tuple[int, IngredientKey]]:
    """Group fills of K_v-F restricted to all-triangle or all-C_n."""
    smax = (v - 2) // 2
    out = []
    for s_b in (0, smax):
        key = IngredientKey.base_hwp(v, 3, n, smax - s_b, s_b, True)
        if key_infeasible(key) is None:
            out.append((s_b, key))
    return out


def _full_range_betas(x: int) -> list[tuple[int, IngredientKey]]:
    """Group fills of K_{3x}-F (x even) over the full published range."""
    v = 3 * x
    smax = (v - 2) // 2
    out = []
    for s_b in range(smax + 1):
        if triangle_hamilton_status(v, s_b) != "exists":
            continue
        key = IngredientKey.base_hwp(v, 3, v, smax - s_b, s_b, True)
        if key_infeasible(key) is None:
            out.append((s_b, key))
    return out


def _twelve_point_betas(n: int) -> list[tuple[int, IngredientKey]]:
    out = []
    for s_b in range(1, 6):
        key = IngredientKey.base_hwp(12, 3, n, 5 - s_b, s_b, True)
        if key_infeasible(key) is None:
            out.append((s_b, key))
    return out


def _six_point_betas() -> list[tuple[int, IngredientKey]]:
    out = []
    for s_b in (1, 2):
        key = IngredientKey.base_hwp(6, 3, 6, 2 - s_b, s_b, True)
        if key_infeasible(key) is None:
            out.append((s_b, key))
    return out


def _theorem_route(x: int, y: int, r: int, s: int) -> Plan | None:
    n = 3 * x
    if x % 2 == 1 and x >= 3 and y % 2 == 1 and y >= 3:
        return _try_weighting(
            x, y, r, s,
            h=3, u=y, x_weight=x, provider="odd", n=n,
            beta_options=_odd_group_betas(x),
            why=f"weighting over a 3-RGDD(3^{y}) with K_{3 * x} group fills",
        )
    if x % 2 == 1 and x >= 3 and y % 2 == 0 and y >= 8:
        return _try_weighting(
            x, y, r, s,
            h=6, u=y // 2, x_weight=x, provider="odd", n=n,
            beta_options=_single_type_betas(6 * x, n),
            why=f"weighting over a 3-RGDD(6^{y // 2}) with K_{6 * x}-F group fills",
        )
    if x % 2 == 0 and y % 2 == 1:
        if x == 2:
            if s in (1, 2):
                if y == 3:
                    # The cited route would need a 3-RGDD(6^3), which does
                    # not exist; at 18 points the instance is searched whole.
                    return _direct_plan(x, y, r, s, "direct search at 18 points")
                return _try_weighting(
                    x, y, r, s,
                    h=6, u=y, x_weight=1, provider="unit", n=n,
                    beta_options=_six_point_betas(),
                    why=f"weighting over a 3-RGDD(6^{y}) with K_6-F group fills",
                )
            return _try_weighting(
                x, y, r, s,
                h=3, u=y, x_weight=2, provider="k23", n=n,
                beta_options=_six_point_betas(),
                why=f"weighting over a 3-RGDD(3^{y}) with K_6-F group fills",
            )
        if x == 4:
            return _try_weighting(
                x, y, r, s,
                h=3, u=y, x_weight=4, provider="equip", n=n,
                beta_options=_twelve_point_betas(n),
                why=f"weighting over a 3-RGDD(3^{y}) with K_12-F group fills",
            )
        if x >= 8:
            return _try_weighting(
                x, y, r, s,
                h=3, u=y, x_weight=x, provider="equip", n=n,
                beta_options=_full_range_betas(x),
                why=f"weighting over a 3-RGDD(3^{y}) with K_{3 * x}-F group fills",
            )
        return None  # x = 6, y odd: no construction is known
    if x % 2 == 0 and y % 2 == 0:
        if x == 2:
            if y % 4 == 2 and y >= 6:
                return _try_weighting(
                    x, y, r, s,
                    h=3, u=y // 2, x_weight=4, provider="blown", n=n,
                    beta_options=_twelve_point_betas(n),
                    why=f"weighting over a 3-RGDD(3^{y // 2}) with K_12-F group fills",
                )
            if y % 4 == 0 and y >= 12:
                return _try_weighting(
                    x, y, r, s,
                    h=6, u=y // 4, x_weight=4, provider="blown", n=n,
                    beta_options=_twelve_point_betas(n),
                    gamma_options=_gamma_options(4, n),
                    why=f"grouped weighting over a 3-RGDD(6^{y // 4})",
                )
            return None  # y in {2, 4, 8}: base cases and open points
        if x == 4:
            if y >= 6:
                return _try_weighting(
                    x, y, r, s,
                    h=6, u=y // 2, x_weight=4, provider="equip", n=n,
                    beta_options=_twelve_point_betas(n),
                    gamma_options=_gamma_options(4, n),
                    why=f"grouped weighting over a 3-RGDD(6^{y // 2})",
                )
            return None
        if x % 4 == 2 and y >= 6:
            if y % 4 == 2:
                return _try_weighting(
                    x, y, r, s,
                    h=3, u=y // 2, x_weight=2 * x, provider="blown", n=n,
                    beta_options=_single_type_betas(6 * x, n),
                    why=f"weighting over a 3-RGDD(3^{y // 2}) blown up by {2 * x}",
                )
            if y % 4 == 0:
                return _try_weighting(
                    x, y, r, s,
                    h=6, u=y // 4, x_weight=2 * x, provider="blown", n=n,
                    beta_options=_single_type_betas(6 * x, n),
                    gamma_options=_gamma_options(2 * x, n),
                    why=f"grouped weighting over a 3-RGDD(6^{y // 4})",
                )
        if x % 4 == 0 and x >= 8 and y >= 8:
            return _try_weighting(
                x, y, r, s,
                h=6, u=y // 2, x_weight=x, provider="equip", n=n,
                beta_options=_full_range_betas(x),
                gamma_options=_gamma_options(x, n),
                why=f"grouped weighting over a 3-RGDD(6^{y // 2})",
            )
        return None
    return None


def _gamma_options(x_weight: int, n: int) -> list[tuple[int, IngredientKey]]:
    """Group decompositions of K_{(x_weight:6)}: all triangles or all C_n."""
    count = x_weight * 5 // 2
    out = []
    for s_g, length in ((0, 3), (count, n)):
        key = IngredientKey.equipartite_factorization(x_weight, 6, length)
        if key_infeasible(key) is None:
            out.append((s_g, key))
    return out


def _direct_plan(x: int, y: int, r: int, s: int, why: str) -> Plan | None:
    v = 3 * x * y
    key = IngredientKey.base_hwp(v, 3, 3 * x, r, s, v % 2 == 0)
    if key_infeasible(key) is not None:
        return None
    return Plan(
        strategy="direct", x=x, y=y, r=r, s=s, why=why, ingredients=(key,)
    )


def _small_route(x: int, y: int, r: int, s: int) -> Plan | None:
    if x % 2 != 0 or y not in (2, 4, 6):
        return None
    part = 3 * x
    if y == 2:
        if x == 2:
            # 12 points: every s >= 1 is a settled base case; doubling
            # realizes s in {4, 5}, the rest is searched directly.
            if s in (4, 5):
                return _doubling_plan(x, y, r, s)
            if s >= 1:
                return _direct_plan(x, y, r, s, "direct search (settled 12-point case)")
            return None
        return _doubling_plan(x, y, r, s)
    # y in {4, 6}: disjoint part fills plus a single-type cross
    cross_count = part * (y - 1) // 2
    for e1 in (0, 1):
        s1 = s - e1 * cross_count
        r1 = r - (1 - e1) * cross_count
        if s1 < 0 or r1 < 0:
            continue
        if triangle_hamilton_status(part, s1) != "exists":
            continue
        half_key = IngredientKey.base_hwp(part, 3, part, r1, s1, True)
        cross_key = IngredientKey.equipartite_factorization(part, y, part if e1 else 3)
        if key_infeasible(half_key) is not None or key_infeasible(cross_key) is not None:
            continue
        return Plan(
            strategy="parts",
            x=x, y=y, r=r, s=s,
            why=f"{y} disjoint K_{part}-F fills plus a single-type cross",
            e1=e1,
            ingredients=(half_key, cross_key),
        )
    return None


def _doubling_plan(x: int, y: int, r: int, s: int) -> Plan | None:
    part = 3 * x
    s1 = s - part // 2
    if s1 < 0 or triangle_hamilton_status(part, s1) != "exists":
        return None
    half_key = IngredientKey.base_hwp(part, 3, part, r, s1, True)
    if key_infeasible(half_key) is not None:
        return None
    keys = [half_key]
    if x != 2:
        keys.append(IngredientKey.equipartite_factorization(part, 2, part))
    return Plan(
        strategy="doubling",
        x=x, y=y, r=r, s=s,
        why=f"doubling a decomposition of K_{part}-F",
        ingredients=tuple(keys),
    )


def _extremes_route(x: int, y: int, r: int, s: int) -> Plan | None:
    v = 3 * x * y
    smax = (v - 1) // 2 if v % 2 else (v - 2) // 2
    if s == 0:
        return _direct_plan(x, y, r, s, "all-triangle resolvable factorization")
    if s == smax:
        return _direct_plan(x, y, r, s, f"all-C{3 * x} resolvable factorization")
    return None


def plan(x: int, y: int, r: int, s: int):
    """Classify and plan a request: Plan, KnownException or OpenCase.

    Raises ParameterError when the necessary conditions fail or the
    parameters are outside the x, y >= 2 scope.
    """
    if x < 2 or y < 2:
        raise ParameterError("constructions cover x >= 2 and y >= 2")
    violations = check_necessary(x, y, r, s)
    if violations:
        raise ParameterError("; ".join(violations))
    if s == 1 and x == 3 and y % 2 == 1:
        return KnownException(EXCEPTION_X3_S1)
    if s == 0 and x == 2 and y == 2:
        return KnownException(EXCEPTION_Y2_S0)
    outcome = _theorem_route(x, y, r, s)
    if outcome is not None:
        return outcome
    outcome = _small_route(x, y, r, s)
    if outcome is not None:
        return outcome
    outcome = _extremes_route(x, y, r, s)
    if outcome is not None:
        return outcome
    for predicate, bullet in OPEN_BULLETS:
        if predicate(x, y, s):
            return OpenCase(bullet)
    return OpenCase("not reached by the implemented constructions")


# ---------------------------------------------------------------------------
# Execution
# ---------------------------------------------------------------------------


def _class_decomposition(
    provider: str,
    x_weight: int,
    n: int,
    s_p: int,
    store: IngredientStore,
    budget: SearchBudget,
):
    if provider == "odd":
        return decompose_class_odd(x_weight, n, s_p)
    if provider == "blown":
        xbar = x_weight // 4
        d = constructions.decompose_k4x3(xbar, s_p)
        if d.n != n:
            raise ParameterError(f"blown classes give C_{d.n}, target C_{n}")
        return d
    if provider == "unit":
        triangle = TwoFactor((Cycle((0, 1, 2)),), 3, 3)
        return Decomposition.build(
            GraphSpec.equipartite(1, 3), 3, n, [(M_TAG, triangle)]
        )
    if provider == "k23":
        return search_oracle(GraphSpec.equipartite(2, 3), 3, 6, 2 - s_p, s_p, budget)
    if provider == "equip":
        length = 3 if s_p == 0 else n
        got = store.get(
            IngredientKey.equipartite_factorization(x_weight, 3, length), budget
        )
        if isinstance(got, NotFound):
            return got
        return _retag(got, 3, n)
    raise ParameterError(f"unknown class provider {provider!r}")


def decompose_class_odd(x_weight: int, n: int, s_p: int) -> Decomposition:
    d = constructions.decompose_tripartite_odd(x_weight, s_p)
    if d.n != n:
        if s_p > 0:
            raise ParameterError(f"odd classes give C_{d.n}, target C_{n}")
        return _retag(
            Decomposition(d.graph, 3, n, d.factors, d.tags, None, d.r, d.s), 3, n
        )
    return d


def execute(
    p: Plan,
    store: IngredientStore | None = None,
    budget: SearchBudget = DEFAULT_BUDGET,
):
    """Run a plan against the ingredient store; the result is verified."""
    store = store if store is not None else IngredientStore()
    if p.strategy == "direct":
        return store.get(p.ingredients[0], budget)
    if p.strategy == "doubling":
        half = store.get(p.ingredients[0], budget)
        if isinstance(half, NotFound):
            return half
        return double(half, store, budget)
    if p.strategy == "parts":
        return compose_parts(p.x, p.y, p.r, p.s, store, budget, e1=p.e1)
    if p.strategy in ("weighting", "weighting-grouped"):
        n = 3 * p.x
        rgdd = store.get(IngredientKey.rgdd3(p.h, p.u), budget)
        if isinstance(rgdd, NotFound):
            return rgdd
        classes = []
        for s_p in p.class_s:
            cdec = _class_decomposition(p.class_provider, p.x_weight, n, s_p, store, budget)
            if isinstance(cdec, NotFound):
                return cdec
            classes.append(cdec)
        beta_key = p.ingredients[1]
        fill = store.get(beta_key, budget)
        if isinstance(fill, NotFound):
            return fill
        fill = _retag(fill, 3, n)
        if p.strategy == "weighting":
            return compose_weighting(rgdd, p.x_weight, classes, fill)
        gamma_key = p.ingredients[2]
        gamma = store.get(gamma_key, budget)
        if isinstance(gamma, NotFound):
            return gamma
        gamma = _retag(gamma, 3, n)
        return compose_weighting_grouped(rgdd, p.x_weight, classes, fill, gamma)
    raise ParameterError(f"unknown strategy {p.strategy!r}")


def solve(
    x: int,
    y: int,
    r: int,
    s: int,
    store: IngredientStore | None = None,
    budget: SearchBudget = DEFAULT_BUDGET,
):
    """Build a certified decomposition for (x, y, r, s), or classify the point.

    Returns a verified :class:`Decomposition`, a :class:`KnownException`,
    an :class:`OpenCase`, or :class:`NotFound` when an ingredient is out
    of reach.  When a planned ingredient is missing and the instance has
    at most 18 points, the whole instance is searched directly before
    giving up.
    """
    store = store if store is not None else IngredientStore()
    outcome = plan(x, y, r, s)
    if not isinstance(outcome, Plan):
        return outcome
    result = execute(outcome, store, budget)
    if isinstance(result, NotFound):
        v = 3 * x * y
        if v <= 18 and outcome.strategy != "direct":
            fallback = _direct_plan(x, y, r, s, "direct search fallback")
            if fallback is not None:
                direct = store.get(fallback.ingredients[0], budget)
                if not isinstance(direct, NotFound):
                    return direct
        return result
    if (result.r, result.s) != (r, s):
        raise AssertionError(
            f"plan delivered (r,s)=({result.r},{result.s}), wanted ({r},{s})"
        )
    return result
