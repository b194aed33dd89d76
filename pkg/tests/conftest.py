import pytest

from htd import parse_query
from htd.hypertree import Hypertree, HtVertex, QdVertex, QueryDecomposition

# Q1: student enrolled in a course taught by a parent (cyclic, width 2)
Q1_TEXT = "ans <- enrolled(S,C,R), teaches(P,C,A), parent(P,S)."
# Q2: professor with a child enrolled somewhere (acyclic)
Q2_TEXT = "ans <- teaches(P,C,A), enrolled(S,C',R), parent(P,S)."
Q3_TEXT = "ans <- r(Y,Z), g(X,Y), s(Y,Z,U), s(Z,U,W), t(Y,Z), t(Z,U)."
# Q4: cyclic with query width 2
Q4_TEXT = "ans <- s(Y,Z,U), g(X,Y), t(Z,X), s(Z,W,X), t(Y,Z)."
# Q5: hypertree width 2 but query width 3
Q5_TEXT = (
    "ans <- a(Xab,X,X',Xac,Xaf), b(Xab,Y,Y',Xbc,Xbf), c(Xac,Xbc,Z), "
    "d(X,Z), e(Y,Z), f(Xaf,Xbf,Z'), g(X',Z'), h(Y',Z'), j(J,X,Y,X',Y')."
)

TRIANGLE_TEXT = "ans <- r(X,Y), s(Y,Z), t(Z,X)."


@pytest.fixture
def q1():
    return parse_query(Q1_TEXT)


@pytest.fixture
def q2():
    return parse_query(Q2_TEXT)


@pytest.fixture
def q3():
    return parse_query(Q3_TEXT)


@pytest.fixture
def q4():
    return parse_query(Q4_TEXT)


@pytest.fixture
def q5():
    return parse_query(Q5_TEXT)


@pytest.fixture
def triangle():
    return parse_query(TRIANGLE_TEXT)


@pytest.fixture
def q1_hd():
    """Complete width-2 decomposition of Q1: the teaches/parent pair on top,
    enrolled below."""
    return Hypertree(
        [
            HtVertex(0, None, frozenset("PSCA"), frozenset({1, 2})),
            HtVertex(1, 0, frozenset("SCR"), frozenset({0})),
        ]
    )


@pytest.fixture
def q1_qd():
    """Width-2 pure query decomposition of Q1."""
    return QueryDecomposition(
        [
            QdVertex(0, None, frozenset({("atom", 1), ("atom", 2)})),
            QdVertex(1, 0, frozenset({("atom", 0)})),
        ]
    )


@pytest.fixture
def q4_qd():
    """Width-2 pure query decomposition of Q4: the s/t pair on top, the
    remaining atoms as leaves."""
    return QueryDecomposition(
        [
            QdVertex(0, None, frozenset({("atom", 0), ("atom", 2)})),
            QdVertex(1, 0, frozenset({("atom", 1)})),
            QdVertex(2, 0, frozenset({("atom", 3)})),
            QdVertex(3, 0, frozenset({("atom", 4)})),
        ]
    )
