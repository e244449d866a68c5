from __future__ import annotations

import pytest

from digraphlab import PatternDigraph, WeightParam


@pytest.fixture(scope="session")
def c3() -> PatternDigraph:
    return PatternDigraph.from_text("n=3; 0 1; 1 2; 2 0")


@pytest.fixture(scope="session")
def t3() -> PatternDigraph:
    return PatternDigraph.from_text("n=3; 0 1; 1 2; 0 2")


@pytest.fixture(scope="session")
def dk3() -> PatternDigraph:
    return PatternDigraph.from_text("n=3; 0 1; 1 0; 0 2; 2 0; 1 2; 2 1")


@pytest.fixture(scope="session")
def twocycle() -> PatternDigraph:
    return PatternDigraph.from_text("n=2; 0 1; 1 0")


@pytest.fixture(scope="session")
def p3() -> PatternDigraph:
    return PatternDigraph.from_text("n=3; 0 1; 1 2")


@pytest.fixture(scope="session")
def a2() -> WeightParam:
    return WeightParam.from_rational(2)


@pytest.fixture(scope="session")
def a4() -> WeightParam:
    return WeightParam.from_rational(4)


@pytest.fixture(scope="session")
def alog() -> WeightParam:
    return WeightParam.parse("log2(3)")
