"""Shared prime tables, built once per session.

The medium table carries a small margin past 10^6 because progression class
values for x = 10^6, q = 5 reach n*q + a = 10^6 + 1.
"""

import pytest

from pretentious.arith import PrimeTable


@pytest.fixture(scope="session")
def table_small():
    return PrimeTable(2 * 10**4)


@pytest.fixture(scope="session")
def table_medium():
    return PrimeTable(10**6 + 8)


@pytest.fixture(scope="session")
def table_large():
    return PrimeTable(10**7)
