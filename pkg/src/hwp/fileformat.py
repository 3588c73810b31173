"""Plain-text serialization of decompositions.

One decomposition per file, UTF-8 with LF endings:

    HWP v=<v> graph=<complete|minusF|equipartite:h,u> m=<m> n=<n> r=<r> s=<s>
    FACTOR <idx> len=<length>
    (<id> <id> ...)          one line per cycle, canonical rotation
    ...
    ONEFACTOR                optional final block
    <a> <b>                  matching edges, sorted ascending

Factors appear in construction order and cycles are sorted by smallest
id, so serialization is byte-exact for a given decomposition.
"""

from __future__ import annotations

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
    TwoFactor,
)


class ParseError(ValueError):
    """The file does not follow the decomposition text format."""


def _graph_token(g: GraphSpec) -> str:
    if g.kind == EQUIPARTITE:
        return f"equipartite:{g.h},{g.u}"
    return g.kind


def _parse_graph_token(token: str, v: int) -> GraphSpec:
    if token == COMPLETE:
        return GraphSpec.complete(v)
    if token == MINUS_F:
        return GraphSpec.complete_minus_one_factor(v)
    if token.startswith("equipartite:"):
        try:
            h, u = (int(t) for t in token.split(":", 1)[1].split(","))
        except ValueError as exc:
            raise ParseError(f"bad equipartite parameters in {token!r}") from exc
        if h * u != v:
            raise ParseError(f"equipartite {h}x{u} does not match v={v}")
        return GraphSpec.equipartite(h, u)
    raise ParseError(f"unknown graph token {token!r}")


def serialize(d: Decomposition) -> str:
    lines = [
        f"HWP v={d.graph.v} graph={_graph_token(d.graph)}"
        f" m={d.m} n={d.n} r={d.r} s={d.s}"
    ]
    for idx, factor in enumerate(d.factors):
        lines.append(f"FACTOR {idx} len={factor.cycle_length}")
        for cycle in factor.cycles:
            lines.append("(" + " ".join(str(x) for x in cycle.vertices) + ")")
    if d.one_factor is not None:
        lines.append("ONEFACTOR")
        for a, b in d.one_factor.edges:
            lines.append(f"{a} {b}")
    return "\n".join(lines) + "\n"


def _header_fields(line: str) -> dict[str, str]:
    parts = line.split()
    if not parts or parts[0] != "HWP":
        raise ParseError("first line must start with 'HWP'")
    fields = {}
    for part in parts[1:]:
        if "=" not in part:
            raise ParseError(f"bad header field {part!r}")
        key, value = part.split("=", 1)
        fields[key] = value
    for key in ("v", "graph", "m", "n", "r", "s"):
        if key not in fields:
            raise ParseError(f"header missing {key}=")
    return fields


def parse(text: str) -> Decomposition:
    lines = [line for line in text.split("\n") if line.strip()]
    if not lines:
        raise ParseError("empty file")
    fields = _header_fields(lines[0])
    try:
        v = int(fields["v"])
        m = int(fields["m"])
        n = int(fields["n"])
        r = int(fields["r"])
        s = int(fields["s"])
    except ValueError as exc:
        raise ParseError("non-integer header field") from exc
    try:
        graph = _parse_graph_token(fields["graph"], v)
    except ValueError as exc:
        raise ParseError(str(exc)) from exc

    factors: list[TwoFactor] = []
    lengths: list[int] = []
    one_factor_edges: list[tuple[int, int]] = []
    cycles: list[Cycle] = []
    length: int | None = None
    in_one_factor = False

    def flush_factor() -> None:
        if length is not None:
            factors.append(TwoFactor(tuple(cycles), length, v))
            lengths.append(length)

    for line in lines[1:]:
        line = line.strip()
        if line.startswith("FACTOR"):
            if in_one_factor:
                raise ParseError("FACTOR block after ONEFACTOR")
            flush_factor()
            parts = line.split()
            if len(parts) != 3 or not parts[2].startswith("len="):
                raise ParseError(f"bad factor header {line!r}")
            try:
                length = int(parts[2][4:])
            except ValueError as exc:
                raise ParseError(f"bad factor length in {line!r}") from exc
            cycles = []
        elif line == "ONEFACTOR":
            flush_factor()
            length = None
            in_one_factor = True
        elif in_one_factor:
            parts = line.split()
            if len(parts) != 2:
                raise ParseError(f"bad matching edge line {line!r}")
            try:
                a, b = int(parts[0]), int(parts[1])
            except ValueError as exc:
                raise ParseError(f"bad matching edge line {line!r}") from exc
            one_factor_edges.append((a, b))
        elif line.startswith("(") and line.endswith(")"):
            if length is None:
                raise ParseError("cycle line before any FACTOR header")
            try:
                ids = tuple(int(t) for t in line[1:-1].split())
            except ValueError as exc:
                raise ParseError(f"bad cycle line {line!r}") from exc
            if len(ids) < 3:
                raise ParseError(f"cycle shorter than 3 in {line!r}")
            cycles.append(Cycle(ids))
        else:
            raise ParseError(f"unrecognized line {line!r}")
    if not in_one_factor:
        flush_factor()

    tags = []
    m_left = r
    for length in lengths:
        if length == m and (length != n or m_left > 0):
            tags.append(M_TAG)
            m_left -= 1
        elif length == n:
            tags.append(N_TAG)
        else:
            raise ParseError(f"factor length {length} matches neither m={m} nor n={n}")

    return Decomposition(
        graph=graph,
        m=m,
        n=n,
        factors=tuple(factors),
        tags=tuple(tags),
        one_factor=OneFactor(tuple(one_factor_edges)) if one_factor_edges else None,
        r=r,
        s=s,
    )
