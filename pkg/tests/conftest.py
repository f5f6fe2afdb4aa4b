from __future__ import annotations

import random
import zlib

import pytest

from ellkit.kernel import check_proof
from ellkit.library import theory
from ellkit.stdlib import corpus


@pytest.fixture
def rng(request) -> random.Random:
    """Deterministic per-test randomness; the seed is the test's own id,
    so reruns and -k selections see identical cases."""
    seed = zlib.crc32(request.node.nodeid.encode())
    return random.Random(seed)


@pytest.fixture(scope="session")
def checked_corpus():
    return {name: check_proof(script, theory) for name, script in corpus().items()}
