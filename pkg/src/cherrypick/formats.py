"""Text formats: edge lists, extended Newick, and pair sequences.

Edge list: one ``parent child [multiplicity]`` per line, ``#`` starts a
comment. Sinks are leaves named by their token; other names are internal.

Extended Newick: hybrid nodes carry ``#tag`` (for example ``#H1``). The one
occurrence with children or a name defines the node; bare ``#tag``
occurrences are extra incoming edges.

Every parse failure is a :class:`ParseError` carrying a 1-based line and
column.
"""
from __future__ import annotations

import bisect
import re
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple, Union

from .network import Network, NetworkError, Pair
from .sequences import Sequence

Text = Union[str, bytes]

_FORBIDDEN = set("#(),;")


class ParseError(ValueError):
    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"line {line}, col {col}: {message}")
        self.message = message
        self.line = line
        self.col = col


@dataclass
class ParseReport:
    root_inserted: bool = False
    merged_edges: int = 0
    names: Dict[str, int] = field(default_factory=dict)


def _decode(text: Text) -> str:
    if isinstance(text, str):
        return text
    try:
        return text.decode("utf-8")
    except UnicodeDecodeError as err:
        before = text[:err.start]
        line = before.count(b"\n") + 1
        col = err.start - (before.rfind(b"\n") + 1) + 1
        raise ParseError("invalid UTF-8", line, col) from None


def valid_token(name: str) -> bool:
    return bool(name) and not any(c.isspace() or c in _FORBIDDEN for c in name)


# -- edge lists --------------------------------------------------------------------

def parse_network(text: Text) -> Tuple[Network, ParseReport]:
    text = _decode(text)
    report = ParseReport()
    first_pos: Dict[str, Tuple[int, int]] = {}
    edges: Dict[Tuple[str, str], int] = {}
    order: List[Tuple[str, str]] = []
    for lineno, raw in enumerate(text.split("\n"), start=1):
        line = raw.split("#", 1)[0]
        tokens = [(m.group(), m.start() + 1) for m in re.finditer(r"\S+", line)]
        if not tokens:
            continue
        if len(tokens) not in (2, 3):
            col = tokens[3][1] if len(tokens) > 3 else tokens[0][1]
            raise ParseError(f"expected 'parent child [multiplicity]', got {len(tokens)} tokens",
                             lineno, col)
        for tok, col in tokens[:2]:
            bad = next((i for i, c in enumerate(tok) if c in _FORBIDDEN), None)
            if bad is not None:
                raise ParseError(f"character {tok[bad]!r} not allowed in a name", lineno, col + bad)
            first_pos.setdefault(tok, (lineno, col))
        (u, ucol), (v, vcol) = tokens[0], tokens[1]
        mult = 1
        if len(tokens) == 3:
            tok, col = tokens[2]
            if not tok.isdigit() or int(tok) < 1:
                raise ParseError(f"multiplicity must be a positive integer, got {tok!r}", lineno, col)
            mult = int(tok)
        if u == v:
            raise ParseError(f"self-loop on {u!r}", lineno, vcol)
        if (u, v) in edges:
            report.merged_edges += 1
        else:
            order.append((u, v))
            edges[(u, v)] = 0
        edges[(u, v)] += mult
    if not edges:
        raise ParseError("no edges", 1, 1)

    heads = {v for _, v in order}
    tails = {u for u, _ in order}
    sources = [name for name in first_pos if name not in heads]
    if not sources:
        name = next(iter(first_pos))
        raise ParseError(f"no source node; cycle through {name!r}", *first_pos[name])
    if len(sources) > 1:
        raise ParseError(f"second source {sources[1]!r}", *first_pos[sources[1]])
    source = sources[0]

    net = Network()
    ids: Dict[str, int] = {}
    outdeg = sum(m for (u, _), m in edges.items() if u == source)
    if outdeg == 1:
        ids[source] = net.root
    else:
        ids[source] = net.add_node()
        net.add_edge(net.root, ids[source])
        report.root_inserted = True
    for name in first_pos:
        if name in ids:
            continue
        ids[name] = net.add_node() if name in tails else net.add_leaf(name)
    for (u, v) in order:
        net.add_edge(ids[u], ids[v], edges[(u, v)])
    try:
        net.validate()
    except NetworkError as err:
        names = {i: n for n, i in ids.items()}
        name = names.get(err.node, source)
        raise ParseError(f"{err} ({name!r})", *first_pos[name]) from None
    report.names = ids
    return net, report


def _prefix_for(net: Network) -> str:
    prefix = "_"
    while any(t.startswith(prefix) for t in net.taxa()):
        prefix += "_"
    return prefix


def _canonical_order(net: Network) -> List[int]:
    """Breadth-first from the root, children sorted by (leaf first, taxon, node id)."""
    from .algorithms import natural_key

    def child_key(c):
        t = net.taxon(c)
        return (0, natural_key(t), 0) if t is not None else (1, (), c)

    seen = {net.root}
    out = [net.root]
    i = 0
    while i < len(out):
        u = out[i]
        i += 1
        for c in sorted(net.children(u), key=child_key):
            if c not in seen:
                seen.add(c)
                out.append(c)
    return out


def _check_taxa(net: Network) -> None:
    for t in net.taxa():
        if not valid_token(t):
            raise ValueError(f"taxon {t!r} cannot be written in this format")


def write_edgelist(net: Network) -> str:
    _check_taxa(net)
    order = _canonical_order(net)
    prefix = _prefix_for(net)
    names = {}
    k = 0
    for v in order:
        if net.is_leaf(v):
            names[v] = net.taxon(v)
        else:
            names[v] = f"{prefix}{k}"
            k += 1
    rank = {v: i for i, v in enumerate(order)}
    lines = []
    for u in order:
        for c in sorted(net.children(u), key=rank.__getitem__):
            m = net.multiplicity(u, c)
            lines.append(f"{names[u]} {names[c]}" + (f" {m}" if m > 1 else ""))
    return "\n".join(lines) + "\n"


# -- extended Newick --------------------------------------------------------------

class _Item:
    __slots__ = ("name", "tag", "children", "pos", "has_parens", "node")

    def __init__(self, pos):
        self.name = ""
        self.tag = ""
        self.children: List["_Item"] = []
        self.pos = pos
        self.has_parens = False
        self.node: Optional[int] = None

    @property
    def is_reference(self) -> bool:
        return bool(self.tag) and not self.has_parens and not self.name


class _Cursor:
    def __init__(self, text: str):
        self.text = text
        self.i = 0
        self.starts = [0] + [m.end() for m in re.finditer("\n", text)]

    def where(self, i: Optional[int] = None) -> Tuple[int, int]:
        i = self.i if i is None else i
        line = bisect.bisect_right(self.starts, i)
        return line, i - self.starts[line - 1] + 1

    def fail(self, msg: str, i: Optional[int] = None):
        raise ParseError(msg, *self.where(i))

    def skip_ws(self) -> None:
        t = self.text
        while self.i < len(t) and t[self.i].isspace():
            self.i += 1

    def peek(self) -> str:
        return self.text[self.i] if self.i < len(self.text) else ""

    def word(self) -> str:
        t, j = self.text, self.i
        while j < len(t) and not t[j].isspace() and t[j] not in _FORBIDDEN:
            j += 1
        w = t[self.i:j]
        self.i = j
        return w


def _read_label(cur: _Cursor, item: _Item) -> None:
    cur.skip_ws()
    item.name = cur.word()
    if cur.peek() == "#":
        cur.i += 1
        at = cur.i
        item.tag = cur.word()
        if not item.tag:
            cur.fail("empty hybrid tag", at)


def _parse_items(cur: _Cursor) -> _Item:
    stack: List[_Item] = []
    top: List[_Item] = []
    expect_subtree = True
    while True:
        cur.skip_ws()
        if expect_subtree:
            if cur.peek() == "(":
                item = _Item(cur.i)
                item.has_parens = True
                stack.append(item)
                cur.i += 1
                continue
            item = _Item(cur.i)
            _read_label(cur, item)
            if not item.name and not item.tag:
                cur.fail("expected a taxon, '(' or hybrid tag", item.pos)
            (stack[-1].children if stack else top).append(item)
            expect_subtree = False
            continue
        c = cur.peek()
        if c == ",":
            if not stack:
                cur.fail("',' outside parentheses")
            cur.i += 1
            expect_subtree = True
        elif c == ")":
            if not stack:
                cur.fail("unmatched ')'")
            cur.i += 1
            item = stack.pop()
            _read_label(cur, item)
            (stack[-1].children if stack else top).append(item)
        elif c == ";":
            if stack:
                cur.fail("unclosed '('", stack[-1].pos)
            cur.i += 1
            cur.skip_ws()
            if cur.i != len(cur.text):
                cur.fail("text after ';'")
            return top[0]
        elif c == "":
            cur.fail("missing ';'")
        else:
            cur.fail(f"unexpected character {c!r}")


def parse_enewick_report(text: Text) -> Tuple[Network, ParseReport]:
    text = _decode(text)
    cur = _Cursor(text)
    cur.skip_ws()
    if cur.i == len(text):
        cur.fail("empty input")
    top = _parse_items(cur)

    items: List[_Item] = []
    stack = [top]
    while stack:
        it = stack.pop()
        items.append(it)
        stack.extend(reversed(it.children))

    defs: Dict[str, _Item] = {}
    refs: Dict[str, List[_Item]] = {}
    for it in items:
        if not it.tag:
            continue
        if it.is_reference:
            refs.setdefault(it.tag, []).append(it)
        elif it.tag in defs:
            cur.fail(f"hybrid tag #{it.tag} defined twice", it.pos)
        else:
            defs[it.tag] = it
    for tag, rs in refs.items():
        if tag not in defs:
            cur.fail(f"hybrid tag #{tag} is never defined", rs[0].pos)
    for tag, d in defs.items():
        if tag not in refs:
            cur.fail(f"hybrid tag #{tag} occurs only once", d.pos)
    if top.is_reference:
        cur.fail("the top node cannot be a hybrid reference", top.pos)

    net = Network()
    report = ParseReport()
    where: Dict[int, int] = {}
    for it in items:
        if it.is_reference:
            continue
        if not it.has_parens and not it.tag:
            if net.leaf(it.name) is not None:
                cur.fail(f"taxon {it.name!r} appears twice", it.pos)
            it.node = net.add_leaf(it.name)
        elif it.has_parens:
            it.node = net.add_node()
        else:
            # a named hybrid without children: reticulation above a leaf
            if net.leaf(it.name) is not None:
                cur.fail(f"taxon {it.name!r} appears twice", it.pos)
            it.node = net.add_node()
            leaf = net.add_leaf(it.name)
            net.add_edge(it.node, leaf)
            where[leaf] = it.pos
        where[it.node] = it.pos
    for it in items:
        if it.is_reference:
            continue
        for c in it.children:
            target = defs[c.tag] if c.is_reference else c
            if net.multiplicity(it.node, target.node):
                report.merged_edges += 1
            net.add_edge(it.node, target.node)
    if top.has_parens and len(top.children) == 1 and not top.tag:
        net.remove_node(net.root)
        net.root = top.node
    else:
        net.add_edge(net.root, top.node)
        report.root_inserted = True
        where[net.root] = top.pos
    try:
        net.validate()
    except NetworkError as err:
        cur.fail(str(err), where.get(err.node, top.pos))
    return net, report


def parse_enewick(text: Text) -> Network:
    return parse_enewick_report(text)[0]


def write_enewick(net: Network) -> str:
    """Extended Newick from the root's child, hybrids tagged ``#H1``, ``#H2``, ..."""
    from .algorithms import natural_key

    _check_taxa(net)
    order = _canonical_order(net)
    rank = {v: i for i, v in enumerate(order)}
    tags: Dict[int, str] = {}
    out: List[str] = []
    # explicit stack of ("node", v) and ("text", s) work items
    work: List[Tuple[str, object]] = [("text", ";"), ("node", net.child(net.root))]
    while work:
        kind, val = work.pop()
        if kind == "text":
            out.append(val)
            continue
        v = val
        if net.is_leaf(v):
            out.append(net.taxon(v))
            continue
        if net.is_reticulation(v):
            if v in tags:
                out.append(f"#{tags[v]}")
                continue
            tags[v] = f"H{len(tags) + 1}"
            suffix = f"#{tags[v]}"
        else:
            suffix = ""
        kids = []
        for c in sorted(net.children(v), key=rank.__getitem__):
            kids.extend([c] * net.multiplicity(v, c))
        out.append("(")
        work.append(("text", ")" + suffix))
        for j in range(len(kids) - 1, -1, -1):
            work.append(("node", kids[j]))
            if j:
                work.append(("text", ","))
    return "".join(out)


def write_network(net: Network, fmt: str = "edgelist") -> str:
    if fmt == "edgelist":
        return write_edgelist(net)
    if fmt == "enewick":
        return write_enewick(net) + "\n"
    raise ValueError(f"unknown format {fmt!r}")


def read_network(text: Text, fmt: Optional[str] = None) -> Network:
    """Parse either format; with no ``fmt`` a text containing ';' is read as Newick."""
    if fmt is None:
        s = _decode(text)
        fmt = "enewick" if ";" in s.split("#", 1)[0] or s.lstrip().startswith("(") else "edgelist"
        text = s
    if fmt == "enewick":
        return parse_enewick(text)
    if fmt == "edgelist":
        return parse_network(text)[0]
    raise ValueError(f"unknown format {fmt!r}")


# -- sequences ----------------------------------------------------------------------

def parse_cps(text: Text) -> Sequence:
    text = _decode(text)
    pairs = []
    for lineno, raw in enumerate(text.split("\n"), start=1):
        line = raw.split("#", 1)[0]
        if not line.strip():
            continue
        cur = _Cursor(line)
        cur.skip_ws()
        a_at = cur.i
        a = cur.word()
        if not a:
            raise ParseError("expected a taxon", lineno, a_at + 1)
        before = cur.i
        cur.skip_ws()
        if cur.peek() == ",":
            cur.i += 1
            cur.skip_ws()
        elif cur.i == before:
            raise ParseError("expected whitespace or ',' between taxa", lineno, cur.i + 1)
        b_at = cur.i
        b = cur.word()
        if not b:
            raise ParseError("expected a second taxon", lineno, b_at + 1)
        cur.skip_ws()
        if cur.i != len(line):
            raise ParseError("unexpected text after pair", lineno, cur.i + 1)
        if a == b:
            raise ParseError(f"pair ({a},{b}) repeats a taxon", lineno, b_at + 1)
        pairs.append(Pair(a, b))
    return Sequence(pairs)


def write_cps(seq) -> str:
    seq = Sequence(seq)
    for p in seq:
        for t in p:
            if not valid_token(t):
                raise ValueError(f"taxon {t!r} cannot be written")
    return "".join(f"{x} {y}\n" for x, y in seq)
