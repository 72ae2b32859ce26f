import math
import random

import pytest

from cqrank.model import Instance, Query, Relation, parse_order, parse_query


@pytest.fixture
def q2path() -> Query:
    return parse_query("Q(A,B,C) :- R(A,B), S(B,C).")


@pytest.fixture
def q3path() -> Query:
    return parse_query("Q(A,B,C,D) :- R(A,B), S(B,C), T(C,D).")


@pytest.fixture
def qstar() -> Query:
    return parse_query("Q(A,B,C,D) :- R(A,B), S(A,C), T(A,D).")


@pytest.fixture
def qproj() -> Query:
    # acyclic but not free-connex: head edge {A,C} closes a triangle
    return parse_query("Qp(A,C) :- R(A,B), S(B,C).")


@pytest.fixture
def qtriangle() -> Query:
    return parse_query("Q(A,B,C) :- R(A,B), S(B,C), T(A,C).")


@pytest.fixture
def db1(q2path) -> Instance:
    return Instance({
        "R": Relation("R", ("A", "B"), ((1, 1), (1, 2), (2, 1))),
        "S": Relation("S", ("B", "C"), ((1, 10), (2, 20), (2, 30))),
    })


def order(text, q):
    return parse_order(text, q)


def random_instance(q: Query, rng: random.Random, n: int, domain: int) -> Instance:
    """One n-row relation per atom name, cells iid uniform on [1, domain]."""
    rels = {}
    for a in q.atoms:
        if a.relation not in rels:
            rels[a.relation] = Relation(
                a.relation,
                tuple(f"c{i}" for i in range(len(a.vars))),
                tuple(tuple(rng.randint(1, domain) for _ in a.vars) for _ in range(n)),
            )
    return Instance(rels)


def domain_for(n: int, join_size: str) -> int:
    return math.ceil(2 * math.sqrt(n)) if join_size == "large" else max(1, math.ceil(n / 10))
