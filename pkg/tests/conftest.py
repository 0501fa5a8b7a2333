"""Session fixtures; the independent oracles live in ``oracles.py``."""

import pytest

from nilflow.algebra import builtin
import sympy as sp


@pytest.fixture(scope="session")
def n4():
    return builtin("n4")


@pytest.fixture(scope="session")
def heis():
    return builtin("heisenberg3")


@pytest.fixture(scope="session")
def n4_syms():
    return sp.symbols("x y z u v w")
