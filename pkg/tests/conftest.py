"""Shared fixtures: body parameter sets and state samplers used across tests."""

import pytest

from chaplygin import BodyParams

VARIANTS = ("plain", "primed")


def standard_body(rank: int) -> BodyParams:
    """Reference body: inertia diag(1, 2, 3), unit mass and radius."""
    return BodyParams(inertia=(1.0, 2.0, 3.0), mass=1.0, radius=1.0, rank=rank)


def asymmetric_body(rank: int) -> BodyParams:
    """Second parameter set, with nothing equal to 1, to catch lucky cancellations."""
    return BodyParams(inertia=(0.7, 1.9, 2.6), mass=1.4, radius=0.6, rank=rank)


@pytest.fixture(params=[0, 1, 2, 3], ids=["rank0", "rank1", "rank2", "rank3"])
def rank(request) -> int:
    return request.param


@pytest.fixture
def body(rank) -> BodyParams:
    return standard_body(rank)


@pytest.fixture
def skew_body(rank) -> BodyParams:
    return asymmetric_body(rank)
