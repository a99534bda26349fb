"""Shared fixtures."""

from collections.abc import Iterator

import pytest

from slowdet.rounding import DEFAULT_PRECISION, working_precision


@pytest.fixture(autouse=True)
def default_precision() -> Iterator[None]:
    """Run every test at the library's default working precision."""
    with working_precision(DEFAULT_PRECISION):
        yield
