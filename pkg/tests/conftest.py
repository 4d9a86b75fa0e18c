import pytest

from zxwebs.surface import (
    CircuitSpec,
    build_diagram,
    build_layout,
    injection_pattern,
    memory_pattern,
)


def make_diagram(d: int, scheme: str, rounds: int = 1):
    layout = build_layout(d)
    if scheme == "inject-y":
        pattern = injection_pattern(layout)
    elif scheme == "memory-z":
        pattern = memory_pattern(layout, "Z")
    elif scheme == "memory-x":
        pattern = memory_pattern(layout, "X")
    else:
        raise ValueError(scheme)
    return layout, build_diagram(CircuitSpec(layout, pattern, rounds=rounds))


@pytest.fixture(scope="session")
def inj3():
    return make_diagram(3, "inject-y")


@pytest.fixture(scope="session")
def inj5():
    return make_diagram(5, "inject-y")


@pytest.fixture(scope="session")
def memz5():
    return make_diagram(5, "memory-z")
