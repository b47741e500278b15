import pytest

from dnls.acceptance import Context


@pytest.fixture(scope="session")
def ctx():
    """Shared cache of the expensive objects (ground states, curve)."""
    return Context()


@pytest.fixture(scope="session")
def q1(ctx):
    return ctx.q1


@pytest.fixture(scope="session")
def curve(ctx):
    return ctx.curve


@pytest.fixture(scope="session")
def s_build(ctx):
    return ctx.s_construction
