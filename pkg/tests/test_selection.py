import builtins
import random
from pathlib import Path

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cqrank.analysis import analyze
from cqrank.baseline import materialize_and_sort
from cqrank.engine import preprocess_lex, preprocess_sum
from cqrank.errors import KOutOfRange, NotRouted, OutOfRange
from cqrank.instrument import SelectStats
from cqrank.model import Instance, Relation, parse_order, parse_query, value_key
from cqrank.selection import (
    conditional_value_counts,
    select_lex,
    select_sum,
    weighted_select,
)

from conftest import random_instance


def test_conditional_value_counts_examples(q2path, db1):
    assert dict(conditional_value_counts(q2path, db1, {}, "A")) == {1: 3, 2: 1}
    assert dict(conditional_value_counts(q2path, db1, {"A": 1}, "B")) == {1: 1, 2: 2}
    assert conditional_value_counts(q2path, db1, {"A": 3}, "B") == []


def test_conditional_value_counts_first_occurrence_order(q2path, db1):
    assert [v for v, _ in conditional_value_counts(q2path, db1, {}, "A")] == [1, 2]


def test_weighted_select_examples():
    items = [(1, 1), (2, 4), (3, 2)]
    rng = random.Random(0)
    assert weighted_select(items, 0, rng) == (1, 0)
    assert weighted_select(items, 3, rng) == (2, 2)
    assert weighted_select(items, 6, rng) == (3, 1)
    with pytest.raises(KOutOfRange):
        weighted_select(items, 7, rng)
    with pytest.raises(KOutOfRange):
        weighted_select(items, -1, rng)


def _select_oracle(items, k):
    merged: dict = {}
    for v, w in items:
        merged[v] = merged.get(v, 0) + w
    for v, w in sorted(merged.items(), key=lambda it: value_key(it[0])):
        if k < w:
            return v, k
        k -= w
    raise AssertionError


def test_weighted_select_matches_sort_walk_bulk():
    rng = random.Random(99)
    for _ in range(10_000):
        m = rng.randint(1, 8)
        items = [(rng.randint(-5, 5), rng.randint(1, 4)) for _ in range(m)]
        total = sum(w for _, w in items)
        k = rng.randrange(total)
        assert weighted_select(items, k, rng) == _select_oracle(items, k)


@settings(max_examples=150, deadline=None)
@given(st.data())
def test_weighted_select_property(data):
    vals = st.one_of(st.integers(-9, 9), st.text(max_size=2))
    items = data.draw(
        st.lists(st.tuples(vals, st.integers(1, 5)), min_size=1, max_size=8)
    )
    total = sum(w for _, w in items)
    k = data.draw(st.integers(0, total - 1))
    assert weighted_select(items, k, random.Random(0)) == _select_oracle(items, k)


def test_select_lex_examples(q2path, db1):
    o = parse_order("lex: A,B,C", q2path)
    assert select_lex(q2path, db1, o, 2, seed=1).as_dict() == {"A": 1, "B": 2, "C": 30}
    oc = parse_order("lex: A,C,B", q2path)
    assert select_lex(q2path, db1, oc, 1, seed=1).as_dict() == {"A": 1, "B": 2, "C": 20}
    with pytest.raises(OutOfRange):
        select_lex(q2path, db1, o, 4, seed=1)


def test_select_lex_not_routed(qproj, db1):
    with pytest.raises(NotRouted):
        select_lex(qproj, db1, parse_order("lex: A,C", qproj), 0)


def test_select_sum_examples(q2path):
    q = parse_query("Q(A,B) :- R(A,B).")
    db = Instance({"R": Relation("R", ("A", "B"), ((1, 5), (2, 2), (3, 1)))})
    o = parse_order("sum: A,B", q)
    assert select_sum(q, db, o, 1, seed=2).values == (3, 1)
    with pytest.raises(OutOfRange):
        select_sum(q, db, o, 3, seed=2)

    db2 = Instance({
        "R": Relation("R", ("A", "B"), ((1, 1), (2, 2))),
        "S": Relation("S", ("B", "C"), ((1, 10), (2, 5))),
    })
    o2 = parse_order("sum: B,C", q2path)
    assert select_sum(q2path, db2, o2, 0, seed=0).as_dict() == {"A": 2, "B": 2, "C": 5}
    with pytest.raises(NotRouted):
        select_sum(q2path, db2, parse_order("sum: A,C", q2path), 0)


def test_select_agrees_with_direct_access(q3path):
    rng = random.Random(31)
    for _ in range(12):
        db = random_instance(q3path, rng, rng.randint(1, 9), rng.randint(1, 3))
        for text in ("lex: A,B,C,D", "lex: B", "sum: C,D"):
            o = parse_order(text, q3path)
            report = analyze(q3path, o)
            if o.kind == "lex":
                ix = preprocess_lex(q3path, db, report)
                sel = select_lex
            else:
                ix = preprocess_sum(q3path, db, report)
                sel = select_sum
            for k in range(ix.count):
                assert sel(q3path, db, o, k, seed=rng.randint(0, 99), report=report) == ix.access(k)


def test_select_lex_trio_orders_match_oracle(q2path):
    rng = random.Random(37)
    o = parse_order("lex: A,C,B", q2path)
    for _ in range(15):
        db = random_instance(q2path, rng, rng.randint(1, 10), rng.randint(1, 3))
        oracle = materialize_and_sort(q2path, db, o)
        for k in range(len(oracle)):
            assert select_lex(q2path, db, o, k, seed=k) == oracle[k]


def test_select_seed_independent_results(q2path, db1):
    o = parse_order("lex: A,B,C", q2path)
    fixed = [select_lex(q2path, db1, o, k, seed=0) for k in range(4)]
    for seed in (1, 7, 12345, None):
        assert [select_lex(q2path, db1, o, k, seed=seed) for k in range(4)] == fixed


def test_selection_never_sorts(q2path, db1, monkeypatch):
    calls = []
    real = builtins.sorted

    def spy(*args, **kwargs):
        calls.append(args)
        return real(*args, **kwargs)

    report = analyze(q2path, parse_order("lex: A,B,C", q2path))
    sreport = analyze(q2path, parse_order("sum: B,C", q2path))
    monkeypatch.setattr(builtins, "sorted", spy)
    for k in range(4):
        select_lex(q2path, db1, parse_order("lex: A,B,C", q2path), k, seed=k, report=report)
    select_sum(q2path, db1, parse_order("sum: B,C", q2path), 0, seed=0, report=sreport)
    assert calls == []


def test_selection_source_has_no_sort_calls():
    import cqrank.selection as mod
    src = Path(mod.__file__).read_text()
    assert "sorted(" not in src
    assert ".sort(" not in src
    assert "heapq" not in src


def test_select_work_bound(q3path):
    rng = random.Random(43)
    db = random_instance(q3path, rng, 200, 20)
    o = parse_order("lex: A,B,C,D", q3path)
    report = analyze(q3path, o)
    ix = preprocess_lex(q3path, db, report)
    n_total = sum(len(r.rows) for r in db.relations.values())
    f = len(q3path.head)
    for k in (0, ix.count // 2, ix.count - 1):
        stats = SelectStats()
        select_lex(q3path, db, o, k, seed=0, stats=stats, report=report)
        assert stats.sort_calls == 0
        assert stats.rows_touched <= 8 * f * n_total
