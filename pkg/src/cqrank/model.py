"""Relational model: values, relations, queries, orders, loading, validation.

Values are plain Python ``int`` / ``str``. The library-wide total order places
every integer before every string; within a kind the native order applies
(numeric for ints, code-point order for strings). ``value_key`` realizes that
order as a sort key, since Python refuses ``int < str`` directly.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path

from .errors import (
    ArityMismatch,
    DuplicateHeadVariable,
    DuplicateVariable,
    EmptyHeader,
    MissingRelation,
    NonFreeVariable,
    NonNumericWeightColumn,
    QuerySyntaxError,
    RaggedRow,
    UnboundHeadVariable,
    UnknownVariable,
)

Value = int | str

LEX = "lex"
SUM = "sum"

_INT_RE = re.compile(r"[+-]?[0-9]+")
_IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")


def value_key(v: Value):
    """Total-order sort key: ints (kind 0) before strs (kind 1)."""
    return (0, v) if isinstance(v, int) else (1, v)


def tuple_key(values):
    return tuple(value_key(v) for v in values)


def parse_cell(text: str) -> Value:
    return int(text) if _INT_RE.fullmatch(text) else text


@dataclass(frozen=True)
class Relation:
    name: str
    columns: tuple[str, ...]
    rows: tuple[tuple[Value, ...], ...]

    def __post_init__(self):
        object.__setattr__(self, "columns", tuple(self.columns))
        object.__setattr__(self, "rows", tuple(tuple(r) for r in self.rows))
        arity = len(self.columns)
        for r in self.rows:
            if len(r) != arity:
                raise ArityMismatch(self.name, len(r), arity)

    @property
    def arity(self) -> int:
        return len(self.columns)


@dataclass(frozen=True)
class Atom:
    relation: str
    vars: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "vars", tuple(self.vars))

    @property
    def var_set(self) -> frozenset[str]:
        return frozenset(self.vars)


@dataclass(frozen=True)
class Query:
    name: str
    head: tuple[str, ...]
    atoms: tuple[Atom, ...]

    def __post_init__(self):
        object.__setattr__(self, "head", tuple(self.head))
        object.__setattr__(self, "atoms", tuple(self.atoms))

    @property
    def head_set(self) -> frozenset[str]:
        return frozenset(self.head)

    @property
    def variables(self) -> frozenset[str]:
        out = set()
        for a in self.atoms:
            out.update(a.vars)
        return frozenset(out)


@dataclass(frozen=True)
class OrderSpec:
    kind: str  # LEX or SUM
    vars: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "vars", tuple(self.vars))
        if self.kind not in (LEX, SUM):
            raise ValueError(f"unknown order kind {self.kind!r}")

    def is_full(self, q: Query) -> bool:
        return self.kind == LEX and len(self.vars) == len(q.head)


@dataclass(frozen=True)
class Instance:
    relations: dict[str, Relation]

    def get(self, name: str) -> Relation:
        try:
            return self.relations[name]
        except KeyError:
            raise MissingRelation(name) from None


@dataclass(frozen=True, slots=True)
class AnswerTuple:
    """Assignment to the head variables, stored in head order."""

    vars: tuple[str, ...]
    values: tuple[Value, ...]

    def as_dict(self) -> dict[str, Value]:
        return dict(zip(self.vars, self.values))

    def __getitem__(self, var: str) -> Value:
        return self.values[self.vars.index(var)]


# --- parsing -----------------------------------------------------------------

class _Scanner:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def skip_ws(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def eof(self) -> bool:
        self.skip_ws()
        return self.pos >= len(self.text)

    def expect(self, token: str):
        self.skip_ws()
        if not self.text.startswith(token, self.pos):
            raise QuerySyntaxError("unexpected input", self.pos, expected=repr(token))
        self.pos += len(token)

    def ident(self) -> str:
        self.skip_ws()
        m = _IDENT_RE.match(self.text, self.pos)
        if not m:
            raise QuerySyntaxError("unexpected input", self.pos, expected="identifier")
        self.pos = m.end()
        return m.group()

    def ident_list(self) -> list[str]:
        names = [self.ident()]
        while True:
            self.skip_ws()
            if self.text.startswith(",", self.pos):
                self.pos += 1
                names.append(self.ident())
            else:
                return names


def parse_query(text: str) -> Query:
    """Parse ``Head(V1,...,Vp) :- Atom1, ..., Atomm .`` into a Query."""
    s = _Scanner(text)
    name = s.ident()
    s.expect("(")
    head = s.ident_list()
    s.expect(")")
    s.expect(":-")
    atoms = []
    while True:
        rel = s.ident()
        s.expect("(")
        vars_ = s.ident_list()
        s.expect(")")
        atoms.append(Atom(rel, tuple(vars_)))
        s.skip_ws()
        if s.text.startswith(",", s.pos):
            s.pos += 1
            continue
        s.expect(".")
        break
    if not s.eof():
        raise QuerySyntaxError("trailing input", s.pos, expected="end of query")

    seen = set()
    for v in head:
        if v in seen:
            raise DuplicateHeadVariable(v)
        seen.add(v)
    body_vars = {v for a in atoms for v in a.vars}
    for v in head:
        if v not in body_vars:
            raise UnboundHeadVariable(v)
    return Query(name, tuple(head), tuple(atoms))


def format_query(q: Query) -> str:
    atoms = ", ".join(f"{a.relation}({','.join(a.vars)})" for a in q.atoms)
    return f"{q.name}({','.join(q.head)}) :- {atoms}."


def parse_order(text: str, q: Query) -> OrderSpec:
    """Parse ``lex: V1,...,Vk`` or ``sum: V1,...,Vk`` against a query."""
    s = _Scanner(text)
    kind = s.ident()
    if kind not in (LEX, SUM):
        raise QuerySyntaxError("unknown order kind", 0, expected="'lex' or 'sum'")
    s.expect(":")
    vars_ = s.ident_list()
    if not s.eof():
        raise QuerySyntaxError("trailing input", s.pos, expected="end of order")

    seen = set()
    body_vars = {v for a in q.atoms for v in a.vars}
    for v in vars_:
        if v in seen:
            raise DuplicateVariable(v)
        seen.add(v)
        if v not in body_vars:
            raise UnknownVariable(v)
        if v not in q.head_set:
            raise NonFreeVariable(v)
    return OrderSpec(kind, tuple(vars_))


def format_order(o: OrderSpec) -> str:
    return f"{o.kind}: {','.join(o.vars)}"


# --- loading -----------------------------------------------------------------

def load_relation(path, name: str) -> Relation:
    """Load a header-first CSV file (comma-separated, no quoting) in file order."""
    text = Path(path).read_text(encoding="utf-8")
    lines = text.replace("\r\n", "\n").split("\n")
    if lines and lines[-1] == "":
        lines.pop()  # trailing newline, not an empty row
    if not lines or lines[0] == "" or any(c == "" for c in lines[0].split(",")):
        raise EmptyHeader(path)
    columns = tuple(lines[0].split(","))
    rows = []
    for lineno, line in enumerate(lines[1:], start=2):
        cells = line.split(",")
        if len(cells) != len(columns):
            raise RaggedRow(lineno, len(cells), len(columns))
        rows.append(tuple(parse_cell(c) for c in cells))
    return Relation(name, columns, tuple(rows))


def load_instance(data_dir, q: Query) -> Instance:
    """Load ``<name>.csv`` from ``data_dir`` for every relation the query names."""
    data_dir = Path(data_dir)
    relations = {}
    for a in q.atoms:
        if a.relation not in relations:
            relations[a.relation] = load_relation(data_dir / f"{a.relation}.csv", a.relation)
    return Instance(relations)


def validate_instance(q: Query, db: Instance, order: OrderSpec | None = None) -> None:
    """Check atom resolution, arity, and (for sum orders) integer weight columns."""
    for a in q.atoms:
        rel = db.get(a.relation)
        if rel.arity != len(a.vars):
            raise ArityMismatch(a.relation, len(a.vars), rel.arity)
    if order is not None and order.kind == SUM:
        weight = set(order.vars)
        for a in q.atoms:
            rel = db.relations[a.relation]
            for pos, v in enumerate(a.vars):
                if v in weight and any(not isinstance(r[pos], int) for r in rel.rows):
                    raise NonNumericWeightColumn(v, a.relation)


# --- bound atoms --------------------------------------------------------------

@dataclass(frozen=True)
class BoundAtom:
    """Atom bound to its relation: repeated variables are enforced on the rows
    and then collapsed, so ``vars`` has no duplicates (first-occurrence order).
    Duplicate rows stay distinct tuples (bag semantics)."""

    index: int
    vars: tuple[str, ...]
    rows: tuple[tuple[Value, ...], ...]


def bound_atoms(q: Query, db: Instance) -> list[BoundAtom]:
    out = []
    for i, a in enumerate(q.atoms):
        rel = db.get(a.relation)
        if rel.arity != len(a.vars):
            raise ArityMismatch(a.relation, len(a.vars), rel.arity)
        first = {}
        for pos, v in enumerate(a.vars):
            first.setdefault(v, []).append(pos)
        keep = tuple(positions[0] for positions in first.values())
        if any(len(p) > 1 for p in first.values()):
            groups = [p for p in first.values() if len(p) > 1]
            rows = tuple(
                tuple(r[p] for p in keep)
                for r in rel.rows
                if all(len({r[p] for p in g}) == 1 for g in groups)
            )
        else:
            rows = rel.rows
        out.append(BoundAtom(i, tuple(first.keys()), rows))
    return out
