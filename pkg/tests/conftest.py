import pathlib

import pytest

GOLDEN = pathlib.Path(__file__).parent / "golden"

GOOD_BAD = "main :- good, bad.\ngood.\n"

POST_PAIR = "post(X,Y) :- one(X,Y), two(X,Y).\none(X,_) :- X=1.\ntwo(_,Y) :- Y=a; Y=b.\n"

TWO_CLAUSE_Q = "q(a,b).\nq(Z,c) :- r(Z).\nr(c).\n"


@pytest.fixture
def golden_dir():
    return GOLDEN
