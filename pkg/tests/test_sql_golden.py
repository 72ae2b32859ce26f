from pathlib import Path

import pytest

from cqrank.baseline import emit_sql
from cqrank.errors import MultiplePositionsWithOffsetDialect
from cqrank.model import parse_order, parse_query

GOLDEN = Path(__file__).parent / "golden"


def test_offset_dialect_golden(q2path):
    sql = emit_sql(q2path, parse_order("lex: A,B,C", q2path), [2], "offset")
    assert sql == (GOLDEN / "two_path_offset.sql").read_text()
    assert "ORDER BY A,B,C" in sql and "OFFSET 2" in sql and "LIMIT 1" in sql


def test_cte_dialect_golden(q2path):
    sql = emit_sql(q2path, parse_order("lex: A,B,C", q2path), [0, 1, 2], "cte")
    assert sql == (GOLDEN / "two_path_cte.sql").read_text()
    assert "ROW_NUMBER() OVER (ORDER BY A,B,C) AS row_idx" in sql
    assert "WHERE row_idx IN (1, 2, 3)" in sql  # one-based row_idx


def test_offset_rejects_multiple_positions(q2path):
    o = parse_order("lex: A,B,C", q2path)
    with pytest.raises(MultiplePositionsWithOffsetDialect):
        emit_sql(q2path, o, [0, 1], "offset")


def test_partial_order_appends_tie_break_columns(q2path):
    sql = emit_sql(q2path, parse_order("lex: A", q2path), [0], "offset")
    assert "ORDER BY A,B,C" in sql  # deterministic completion appended


def test_sum_order_expression(q2path):
    sql = emit_sql(q2path, parse_order("sum: B,C", q2path), [5], "offset")
    assert "ORDER BY B+C," in sql
    assert "OFFSET 5" in sql


def test_projected_query_selects_qualified_columns(qproj):
    sql = emit_sql(qproj, parse_order("lex: A,C", qproj), [0], "offset")
    assert "SELECT R.A, S.C" in sql
    assert "FROM R JOIN S ON R.B=S.B" in sql


def test_self_join_aliases():
    q = parse_query("Q(A,B,C) :- R(A,B), R(B,C).")
    sql = emit_sql(q, parse_order("lex: A,B,C", q), [0], "offset")
    assert "FROM R JOIN R AS R_2 ON R.B=R_2.B" in sql


def test_three_way_join_chain(q3path):
    sql = emit_sql(q3path, parse_order("lex: A,B,C,D", q3path), [0, 9], "cte")
    assert "FROM R JOIN S ON R.B=S.B JOIN T ON S.C=T.C" in sql
    assert "WHERE row_idx IN (1, 10)" in sql


def test_emitted_sql_is_byte_stable(q2path):
    o = parse_order("lex: A,B,C", q2path)
    assert emit_sql(q2path, o, [2], "offset") == emit_sql(q2path, o, [2], "offset")
