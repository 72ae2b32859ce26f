import itertools
import random

import pytest

from cqrank.analysis import (
    Cyclic,
    JoinTree,
    analyze,
    build_variable_tree,
    check_free_connex,
    complete_order,
    effective_order,
    find_disruptive_trio,
    gyo_join_tree,
    head_adjacency,
)
from cqrank.model import Atom, Query, parse_order, parse_query


def _rip_ok(tree: JoinTree) -> bool:
    n = len(tree.node_vars)
    adj = [[] for _ in range(n)]
    for i, p in enumerate(tree.parent):
        if p is not None:
            adj[i].append(p)
            adj[p].append(i)
    for v in set().union(*tree.node_vars) if n else set():
        holders = {i for i in range(n) if v in tree.node_vars[i]}
        start = next(iter(holders))
        seen, stack = {start}, [start]
        while stack:
            u = stack.pop()
            for w in adj[u]:
                if w in holders and w not in seen:
                    seen.add(w)
                    stack.append(w)
        if seen != holders:
            return False
    return True


def test_gyo_two_edge_path():
    t = gyo_join_tree([frozenset("AB"), frozenset("BC")])
    assert isinstance(t, JoinTree)
    i, p = next((i, p) for i, p in enumerate(t.parent) if p is not None)
    assert t.node_vars[i] & t.node_vars[p] == frozenset("B")


def test_gyo_triangle_cyclic():
    t = gyo_join_tree([frozenset("AB"), frozenset("BC"), frozenset("AC")])
    assert isinstance(t, Cyclic)
    assert t.residue


def test_gyo_three_edge_path_separators():
    t = gyo_join_tree([frozenset("AB"), frozenset("BC"), frozenset("CD")])
    assert isinstance(t, JoinTree)
    seps = {t.separator(i) for i in range(3) if t.parent[i] is not None}
    assert seps == {frozenset("B"), frozenset("C")}


def test_gyo_running_intersection_random():
    rng = random.Random(3)
    hits = 0
    for _ in range(500):
        vs = [f"V{i}" for i in range(rng.randint(1, 6))]
        edges = [frozenset(rng.sample(vs, rng.randint(1, len(vs))))
                 for _ in range(rng.randint(1, 5))]
        t = gyo_join_tree(edges)
        if isinstance(t, JoinTree):
            hits += 1
            assert _rip_ok(t)
            assert sum(1 for p in t.parent if p is None) == 1
    assert hits > 100


def test_free_connex_flags(q2path, qproj, qtriangle):
    assert check_free_connex(q2path) == (True, True)
    assert check_free_connex(qproj) == (True, False)
    assert check_free_connex(qtriangle) == (False, False)


def test_trio_examples(q2path):
    assert find_disruptive_trio(q2path, ("A", "C", "B")) == ("A", "C", "B")
    assert find_disruptive_trio(q2path, ("A", "B", "C")) is None
    q = parse_query("Q(A,B) :- R(A,B).")
    assert find_disruptive_trio(q, ("B", "A")) is None


def _brute_trio(q, order):
    adj = head_adjacency(q)
    for x1, x2, x3 in itertools.permutations(order, 3):
        i1, i2, i3 = order.index(x1), order.index(x2), order.index(x3)
        if i1 < i2 < i3 and x1 in adj[x3] and x2 in adj[x3] and x2 not in adj[x1]:
            return True
    return False


def _random_query(rng, max_vars=6):
    nv = rng.randint(3, max_vars)
    head = tuple(f"V{i}" for i in range(nv))
    atoms = []
    for i in range(rng.randint(1, 4)):
        size = rng.randint(1, 3)
        atoms.append(Atom(f"R{i}", tuple(rng.sample(head, size))))
    covered = {v for a in atoms for v in a.vars}
    missing = [v for v in head if v not in covered]
    if missing:
        atoms.append(Atom("Rx", tuple(missing)))
    return Query("Q", head, tuple(atoms))


def test_trio_agrees_with_brute_force():
    rng = random.Random(17)
    for _ in range(300):
        q = _random_query(rng)
        order = list(q.head)
        rng.shuffle(order)
        found = find_disruptive_trio(q, order)
        assert (found is not None) == _brute_trio(q, order)
        if found is not None:
            x1, x2, x3 = found
            adj = head_adjacency(q)
            assert order.index(x1) < order.index(x3) and order.index(x2) < order.index(x3)
            assert x1 in adj[x3] and x2 in adj[x3] and x2 not in adj[x1]


def test_complete_order_examples(q2path):
    assert complete_order(q2path, ("A",)) == ("A", "B", "C")
    assert complete_order(q2path, ("A", "C")) is None
    assert complete_order(q2path, ("A", "B", "C")) == ("A", "B", "C")


def test_complete_order_monotone_prefixes():
    # every prefix of a trio-free full order completes successfully
    rng = random.Random(23)
    for _ in range(200):
        q = _random_query(rng)
        full = complete_order(q, ())
        if full is None:
            continue
        for i in range(len(full) + 1):
            assert complete_order(q, full[:i]) is not None


def test_complete_order_vs_exhaustive_small():
    rng = random.Random(29)
    for _ in range(200):
        q = _random_query(rng, max_vars=5)
        prefix = tuple(rng.sample(q.head, rng.randint(0, len(q.head))))
        got = complete_order(q, prefix)
        rest = [v for v in q.head if v not in set(prefix)]
        exists = any(
            not _brute_trio(q, list(prefix) + list(perm))
            for perm in itertools.permutations(rest)
        )
        assert (got is not None) == exists
        if got is not None:
            assert got[: len(prefix)] == prefix
            assert not _brute_trio(q, list(got))


def test_analyze_lex_examples(q2path, qproj):
    r = analyze(q2path, parse_order("lex: A,C,B", q2path))
    assert not r.routing["DirectLex"].ok
    assert r.trio == ("A", "C", "B")
    assert r.routing["SingleLex"].ok
    assert r.routing["BaselineOnly"].ok

    r = analyze(q2path, parse_order("lex: A,B,C", q2path))
    assert r.routing["DirectLex"].ok and r.completed_order == ("A", "B", "C")

    r = analyze(qproj, parse_order("lex: A,C", qproj))
    assert not r.free_connex
    assert not r.routing["DirectLex"].ok
    assert not r.routing["SingleLex"].ok


def test_analyze_sum_single_atom_rule(q2path):
    r = analyze(q2path, parse_order("sum: B,C", q2path))
    assert r.routing["DirectSum"].ok and r.routing["SingleSum"].ok
    assert r.sum_anchor == 1

    r = analyze(q2path, parse_order("sum: A,C", q2path))
    assert not r.routing["DirectSum"].ok
    assert r.routing["DirectSum"].reasons == ("sum_vars_not_single_atom",)
    assert r.routing["BaselineOnly"].ok


def test_analyze_triangle(qtriangle):
    r = analyze(qtriangle, parse_order("lex: A,B,C", qtriangle))
    assert not r.acyclic and not r.free_connex
    assert not r.routing["DirectLex"].ok and not r.routing["SingleLex"].ok


def test_report_json_fields(q2path):
    d = analyze(q2path, parse_order("lex: A", q2path)).to_json_dict()
    assert set(d) == {"acyclic", "free_connex", "trio", "completed_order", "routing"}
    assert set(d["routing"]) == {
        "DirectLex", "DirectSum", "SingleLex", "SingleSum", "BaselineOnly"
    }


def test_effective_order_prefix_preserved(q2path):
    assert effective_order(q2path, parse_order("lex: B", q2path))[0] == "B"
    # intractable partial order still gets a deterministic full tie-break
    eff = effective_order(q2path, parse_order("lex: A,C", q2path))
    assert eff[:2] == ("A", "C") and set(eff) == {"A", "B", "C"}


def test_variable_tree_structure(q3path):
    vt = build_variable_tree(q3path, ("A", "B", "C", "D"))
    assert vt.nsets == ((), ("A",), ("B",), ("C",))
    assert vt.parent == (None, 0, 1, 2)
    adjacency_cover = [set(vt.nsets[i]) | {vt.order[i]} for i in range(4)]
    for i, need in enumerate(adjacency_cover):
        assert need <= q3path.atoms[vt.anchor[i]].var_set
    flat = [a for group in vt.assigned for a in group]
    assert sorted(flat) == [0, 1, 2] and not vt.scalar_atoms


def test_variable_tree_rejects_trio_order(q2path):
    with pytest.raises(AssertionError):
        build_variable_tree(q2path, ("A", "C", "B"))


def test_hypergraph_of_query(qproj):
    from cqrank.analysis import Hypergraph

    h = Hypergraph.of_query(qproj)
    assert h.edges == (frozenset("AB"), frozenset("BC"))
    assert h.vertices == frozenset("ABC")
    hh = Hypergraph.of_query(qproj, include_head=True)
    assert hh.edges[-1] == frozenset("AC")
