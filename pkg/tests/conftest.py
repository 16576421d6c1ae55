"""Pytest configuration and shared fixtures."""

import math
import uuid

import numpy as np
import pytest

from django_upb.catalog import builtin
from django_upb.coarse import classify_upb_across_grainings
from django_upb.models import ClaimRecord, Outcome
from django_upb.services import ClaimResult
from django_upb.states import rank_seven_state
from django_upb.uom import AngleAssignment, instantiate

# Configure pytest-django
pytest_plugins = ["pytest_django"]


@pytest.fixture
def rng() -> np.random.Generator:
    """Seeded generator for property-style tests."""
    return np.random.default_rng(20240611)


@pytest.fixture
def generic_angles() -> AngleAssignment:
    return AngleAssignment.generic()


@pytest.fixture
def symmetric_angles() -> AngleAssignment:
    """All four angles at pi/4."""
    return AngleAssignment.uniform(math.pi / 4)


@pytest.fixture
def size6_basis():
    return instantiate(builtin("size6").uom)


@pytest.fixture
def size7_basis():
    return instantiate(builtin("size7").uom)


@pytest.fixture
def eleventh_basis():
    """The 11th size-9 UPB in the form used by the transformation chain."""
    return instantiate(builtin("size9-11th").uom)


@pytest.fixture
def table_basis():
    """The 11th size-9 UPB as listed in the external table."""
    return instantiate(builtin("size9-11th-table").uom)


@pytest.fixture(scope="session")
def eleventh_report():
    """Graining report of the 11th size-9 UPB, shared across tests."""
    return classify_upb_across_grainings(instantiate(builtin("size9-11th").uom))


@pytest.fixture
def rho_symmetric(symmetric_angles):
    """Rank-seven state at alpha = beta = gamma = delta = pi/4."""
    return rank_seven_state(symmetric_angles)


@pytest.fixture
def rho_generic(generic_angles):
    return rank_seven_state(generic_angles)


@pytest.fixture
def claim_result() -> ClaimResult:
    return ClaimResult(
        claim_id="size6-graining",
        description="size-6 UPB: only AB|C|D survives coarse graining",
        computed={"unextendible": True, "upbs": ["AB|C|D"]},
        expected={"unextendible": True, "upbs": ["AB|C|D"]},
        passed=True,
        runtime=0.25,
    )


@pytest.fixture
def failed_claim_result() -> ClaimResult:
    return ClaimResult(
        claim_id="size7-graining",
        description="size-7 UPB: no coarse graining is a UPB",
        computed={"upbs": ["AB|C|D"]},
        expected={"upbs": []},
        passed=False,
        runtime=0.5,
    )


@pytest.fixture
def claim_record(db) -> ClaimRecord:
    return ClaimRecord.objects.create(
        claim_id="gme-optimum",
        description="geometric measure of the rank-seven state at pi/4",
        computed={"max_overlap": 0.1312226},
        expected={"max_overlap": 0.1312226},
        outcome=Outcome.PASS,
        runtime=12.5,
        run_id=uuid.uuid4(),
    )


@pytest.fixture
def failed_claim_record(db) -> ClaimRecord:
    return ClaimRecord.objects.create(
        claim_id="size9-spans",
        description="AB-side span ranks of the 11th size-9 UPB",
        computed={"six_subset_ranks": [3, 4]},
        expected={"six_subset_ranks": [4]},
        outcome=Outcome.FAIL,
        runtime=0.1,
        run_id=uuid.uuid4(),
    )
