"""Shared fixtures: the frozen canonical pair and its full pipeline run."""

import pytest

import srsd


@pytest.fixture(scope="session")
def canonical():
    """(x, y, expected change-point labels) for the frozen fixture."""
    return srsd.canonical_fixture()


@pytest.fixture(scope="session")
def canonical_result(canonical):
    x, y, _ = canonical
    return srsd.run_srsd(x, y)
