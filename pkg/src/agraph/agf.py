"""Reader and writer for ``.agf`` attack-graph definition files.

The format is line oriented::

    #!agf 1
    # comment
    goal data_acquisition "Data Acquisition"
    node get_dev_add "Get Dev Address" weight=2 role=mandatory tags=bluetooth,device_address
    edge get_dev_add -> data_acquisition
    gate data_acquisition or
    scope blueover = get_dev_add
    fail get_dev_add

``#!agf <version>`` is an optional header; any other ``#`` starts a comment.
``fail`` pins steps to failure (written for neutralized graphs only).
Every problem is reported with a 1-based line and column.
"""

from __future__ import annotations

import re
import warnings
from dataclasses import dataclass, field

from agraph.errors import AgfSyntaxError
from agraph.graph import (
    ID_PATTERN,
    AttackGraph,
    GateKind,
    Goal,
    Role,
    StepNode,
    validate,
)

FORMAT_VERSION = 1
KEYWORDS = ("goal", "node", "edge", "gate", "scope", "fail")
TAG_PATTERN = re.compile(r"[a-z0-9_]+\Z")

_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<comment>\#.*)
  | (?P<string>"(?:[^"\\]|\\.)*")
  | (?P<arrow>->)
  | (?P<eq>=)
  | (?P<comma>,)
  | (?P<word>[^\s=,"\#]+)
  | (?P<bad>.)
    """,
    re.VERBOSE,
)


class AgfWarning(UserWarning):
    pass


@dataclass(frozen=True)
class Diagnostic:
    line: int
    column: int
    code: str
    message: str
    expected: tuple[str, ...] = ()

    def __str__(self) -> str:
        text = f"{self.line}:{self.column}: {self.code}: {self.message}"
        if self.expected:
            text += f" (expected {' or '.join(self.expected)})"
        return text


@dataclass(frozen=True)
class _Tok:
    kind: str
    text: str
    col: int


def _unquote(raw: str) -> str:
    body = raw[1:-1]
    return re.sub(r"\\(.)", lambda m: "\n" if m.group(1) == "n" else m.group(1), body)


def _quote(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n") + '"'


def _tokenize(line: str, lineno: int, diags: list[Diagnostic]) -> list[_Tok]:
    toks = []
    for m in _TOKEN.finditer(line):
        kind = m.lastgroup
        if kind in ("ws", "comment"):
            continue
        if kind == "bad":
            diags.append(Diagnostic(lineno, m.start() + 1, "SyntaxError", f"unexpected character {m.group()!r}"))
            continue
        toks.append(_Tok(kind, m.group(), m.start() + 1))
    return toks


@dataclass
class AgfDocument:
    """Parsed statements of one ``.agf`` file, before graph validation.

    ``locations`` maps node ids, edges, gates and scopes to the
    ``(line, column)`` of the statement that declared them.
    """

    version: int = FORMAT_VERSION
    goal: Goal | None = None
    nodes: list[StepNode] = field(default_factory=list)
    edges: list[tuple[str, str]] = field(default_factory=list)
    gates: dict[str, GateKind] = field(default_factory=dict)
    scopes: dict[str, tuple[str, ...]] = field(default_factory=dict)
    failed: list[str] = field(default_factory=list)
    comments: list[str] = field(default_factory=list)
    locations: dict[object, tuple[int, int]] = field(default_factory=dict, compare=False, repr=False)

    def to_graph(self) -> AttackGraph:
        assert self.goal is not None
        return AttackGraph(
            goal=self.goal,
            steps=tuple(self.nodes),
            edges=tuple(self.edges),
            gates=self.gates,
            scopes=self.scopes,
            forced_fail=frozenset(self.failed),
        )

    @classmethod
    def from_graph(cls, graph: AttackGraph) -> "AgfDocument":
        return cls(
            goal=graph.goal,
            nodes=list(graph.steps),
            edges=list(graph.edges),
            gates=dict(graph.gates),
            scopes=dict(graph.scopes),
            failed=sorted(graph.forced_fail),
        )

    def emit(self) -> str:
        """Canonical text: header, comments, then goal/node/edge/gate/scope/fail."""
        out = [f"#!agf {self.version}"]
        out += [f"# {c}" if c else "#" for c in self.comments]
        out.append("")
        if self.goal is not None:
            g = f"goal {self.goal.id} {_quote(self.goal.label)}"
            if self.goal.weight:
                g += f" weight={self.goal.weight}"
            out += [g, ""]
        sections = [
            [_node_line(n) for n in sorted(self.nodes, key=lambda n: n.id)],
            [f"edge {a} -> {b}" for a, b in sorted(set(self.edges))],
            [f"gate {n} {k.value}" for n, k in sorted(self.gates.items())],
            [f"scope {name} = {','.join(ids)}" for name, ids in sorted(self.scopes.items())],
            [f"fail {','.join(sorted(set(self.failed)))}"] if self.failed else [],
        ]
        for lines in sections:
            if lines:
                out += lines + [""]
        return "\n".join(out).rstrip("\n") + "\n"


def _node_line(n: StepNode) -> str:
    parts = [f"node {n.id} {_quote(n.label)} weight={n.weight}"]
    if n.role is not None:
        parts.append(f"role={n.role.value}")
    if n.tags:
        parts.append(f"tags={','.join(sorted(n.tags))}")
    return " ".join(parts)


class _LineParser:
    def __init__(self, toks: list[_Tok], lineno: int, line_len: int, diags: list[Diagnostic]) -> None:
        self.toks = toks
        self.pos = 0
        self.lineno = lineno
        self.end_col = line_len + 1
        self.diags = diags

    def peek(self) -> _Tok | None:
        return self.toks[self.pos] if self.pos < len(self.toks) else None

    def fail(self, msg: str, expected: tuple[str, ...] = (), code: str = "SyntaxError", tok: _Tok | None = None) -> None:
        tok = tok or self.peek()
        col = tok.col if tok is not None else self.end_col
        self.diags.append(Diagnostic(self.lineno, col, code, msg, expected))
        raise _Abort

    def take(self, kind: str, expected: str) -> _Tok:
        tok = self.peek()
        if tok is None or tok.kind != kind:
            found = "end of line" if tok is None else repr(tok.text)
            self.fail(f"found {found}", (expected,))
        self.pos += 1
        return tok

    def ident(self, what: str = "identifier") -> _Tok:
        tok = self.take("word", what)
        if not ID_PATTERN.match(tok.text):
            self.fail(f"{what} {tok.text!r} must match [a-z0-9_]+", code="InvalidId", tok=tok)
        return tok

    def id_list(self, what: str) -> list[str]:
        ids = [self.ident(what).text]
        while self.peek() is not None and self.peek().kind == "comma":
            self.pos += 1
            ids.append(self.ident(what).text)
        return ids

    def maybe_label(self) -> str:
        tok = self.peek()
        if tok is not None and tok.kind == "string":
            self.pos += 1
            return _unquote(tok.text)
        return ""

    def attrs(self, allowed: tuple[str, ...]) -> dict[str, tuple[_Tok, object]]:
        found: dict[str, tuple[_Tok, object]] = {}
        while self.peek() is not None:
            key = self.take("word", "attribute")
            if key.text not in allowed:
                self.fail(f"unknown attribute {key.text!r}", tuple(f"{a}=" for a in allowed), tok=key)
            if key.text in found:
                self.fail(f"attribute {key.text!r} given twice", code="DuplicateAttribute", tok=key)
            self.take("eq", "'='")
            if key.text == "tags":
                tags = self.id_list("tag")
                found["tags"] = (key, tags)
                continue
            val = self.take("word", f"{key.text} value")
            found[key.text] = (val, val.text)
        return found

    def done(self) -> None:
        tok = self.peek()
        if tok is not None:
            self.fail(f"unexpected {tok.text!r}", ("end of line",))


class _Abort(Exception):
    pass


def _weight(p: _LineParser, tok: _Tok, text: str) -> int:
    if not re.fullmatch(r"[+-]?\d+", text):
        p.fail(f"weight {text!r} is not an integer", ("non-negative integer",), code="InvalidWeight", tok=tok)
    value = int(text)
    if value < 0:
        p.fail(f"weight {value} is negative", ("non-negative integer",), code="NegativeWeight", tok=tok)
    return value


def read_document(text: str) -> AgfDocument:
    """Parse text into an :class:`AgfDocument` without graph validation.

    Raises :class:`AgfSyntaxError` carrying every syntax diagnostic.
    """
    doc = AgfDocument()
    diags: list[Diagnostic] = []
    seen_statement = False
    lines = text.splitlines()
    for lineno, line in enumerate(lines, start=1):
        stripped = line.strip()
        if not stripped:
            continue
        if stripped.startswith("#!agf"):
            if seen_statement:
                diags.append(Diagnostic(lineno, 1, "SyntaxError", "format header must precede all statements"))
                continue
            rest = stripped[len("#!agf"):].strip()
            if rest != str(FORMAT_VERSION):
                diags.append(Diagnostic(
                    lineno, 1, "UnsupportedVersion", f"unsupported format version {rest!r}", (str(FORMAT_VERSION),)))
            continue
        if stripped.startswith("#"):
            doc.comments.append(stripped[1:].strip())
            continue
        toks = _tokenize(line, lineno, diags)
        if not toks:
            continue
        seen_statement = True
        p = _LineParser(toks, lineno, len(line), diags)
        try:
            _statement(p, doc)
        except _Abort:
            pass

    if doc.goal is None and not diags:
        diags.append(Diagnostic(max(len(lines), 1), 1, "MissingGoal", "no goal statement", ("goal",)))
    if diags:
        raise AgfSyntaxError(sorted(diags, key=lambda d: (d.line, d.column)))
    return doc


def _statement(p: _LineParser, doc: AgfDocument) -> None:
    head = p.take("word", "statement keyword")
    kw = head.text
    where = (p.lineno, head.col)
    if kw == "goal":
        ident = p.ident("goal id")
        label = p.maybe_label()
        attrs = p.attrs(("weight",))
        weight = _weight(p, *attrs["weight"]) if "weight" in attrs else 0
        p.done()
        if doc.goal is not None:
            p.fail("a graph has exactly one goal", code="DuplicateGoal", tok=head)
        doc.goal = Goal(ident.text, label or ident.text, weight)
        doc.locations[ident.text] = (p.lineno, ident.col)
    elif kw == "node":
        ident = p.ident("node id")
        label = p.maybe_label()
        attrs = p.attrs(("weight", "role", "tags"))
        weight = _weight(p, *attrs["weight"]) if "weight" in attrs else 0
        role = None
        if "role" in attrs:
            tok, value = attrs["role"]
            try:
                role = Role(value)
            except ValueError:
                p.fail(f"unknown role {value!r}", tuple(r.value for r in Role), code="InvalidRole", tok=tok)
        tags = frozenset(attrs["tags"][1]) if "tags" in attrs else frozenset()
        p.done()
        doc.nodes.append(StepNode(ident.text, label or ident.text, weight, role, tags))
        doc.locations.setdefault(ident.text, (p.lineno, ident.col))
    elif kw == "edge":
        a = p.ident("source id")
        p.take("arrow", "'->'")
        b = p.ident("target id")
        p.done()
        doc.edges.append((a.text, b.text))
        doc.locations.setdefault((a.text, b.text), where)
    elif kw == "gate":
        ident = p.ident("node id")
        kind = p.take("word", "and|or")
        if kind.text.lower() not in ("and", "or"):
            p.fail(f"unknown gate {kind.text!r}", ("and", "or"), tok=kind)
        p.done()
        if ident.text in doc.gates:
            p.fail(f"gate for {ident.text!r} declared twice", code="DuplicateGate", tok=ident)
        doc.gates[ident.text] = GateKind(kind.text.lower())
        doc.locations[("gate", ident.text)] = where
    elif kw == "scope":
        name = p.ident("scope name")
        p.take("eq", "'='")
        ids = p.id_list("node id")
        p.done()
        if name.text in doc.scopes:
            p.fail(f"scope {name.text!r} declared twice", code="DuplicateScope", tok=name)
        doc.scopes[name.text] = tuple(ids)
        doc.locations[("scope", name.text)] = where
    elif kw == "fail":
        ids = p.id_list("node id")
        p.done()
        doc.failed.extend(ids)
        for i in ids:
            doc.locations.setdefault(("fail", i), where)
    else:
        p.fail(f"unknown statement {kw!r}", KEYWORDS, tok=head)


def _locate(doc: AgfDocument, violation) -> tuple[int, int]:
    if violation.edge is not None and violation.edge in doc.locations:
        return doc.locations[violation.edge]
    if violation.code == "CycleDetected":
        cyc = violation.nodes
        for a, b in zip(cyc, cyc[1:] + cyc[:1]):
            if (a, b) in doc.locations:
                return doc.locations[(a, b)]
    if violation.code == "ScopeUnknownNode":
        for key, loc in doc.locations.items():
            if isinstance(key, tuple) and key[0] == "scope" and violation.nodes[0] in doc.scopes.get(key[1], ()):
                return loc
    for n in violation.nodes:
        for key in (n, ("gate", n), ("scope", n), ("fail", n)):
            if key in doc.locations:
                return doc.locations[key]
    return (1, 1)


def parse_agf(text: str) -> AttackGraph:
    """Parse and validate ``.agf`` text.

    Syntax problems and graph-invariant violations both surface as an
    :class:`AgfSyntaxError` whose diagnostics carry line and column.  A file
    with a goal but no steps parses, with an :class:`AgfWarning`.
    """
    doc = read_document(text)
    graph = doc.to_graph()
    problems = validate(graph)
    if problems:
        diags = [Diagnostic(*_locate(doc, v), v.code, v.message) for v in problems]
        raise AgfSyntaxError(sorted(diags, key=lambda d: (d.line, d.column, d.code)))
    if not graph.steps:
        warnings.warn("NoSteps: graph has a goal but no steps", AgfWarning, stacklevel=2)
    return graph


def emit_agf(graph: AttackGraph) -> str:
    """Canonical ``.agf`` text for ``graph``; ``parse_agf`` inverts it."""
    return AgfDocument.from_graph(graph).emit()
