import os
import sys

import pytest
from hypothesis import HealthCheck, settings

from malcev.group import MalcevGroup
from malcev.lie import abelian, direct_sum, free_nilpotent, heisenberg, unitriangular

sys.path.insert(0, os.path.dirname(__file__))

settings.register_profile(
    "default", max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


def corpus_algebras():
    return {
        "heisenberg": heisenberg(),
        "f2_3": free_nilpotent(2, 3),
        "u4": unitriangular(4),
        "f3_2": free_nilpotent(3, 2),
        "abelian3": abelian(3),
        "h_x_q3": direct_sum(heisenberg(), abelian(3)),
    }


_GROUPS = {}


def group_of(name):
    if name not in _GROUPS:
        _GROUPS[name] = MalcevGroup(corpus_algebras()[name])
    return _GROUPS[name]


@pytest.fixture
def H():
    return group_of("heisenberg")


@pytest.fixture
def F23():
    return group_of("f2_3")


@pytest.fixture
def U4():
    return group_of("u4")


ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(ACCEPTANCE):
        name, ok, detail = ACCEPTANCE[num]
        line = f"criterion {num:2d} [{'PASS' if ok else 'FAIL'}] {name}"
        if detail:
            line += f" ({detail})"
        terminalreporter.write_line(line)


def hom_corpus():
    """Verified homomorphisms phi: source -> target, by name."""
    from malcev.duality import GroupHom, identity_hom

    H, F23, U4 = group_of("heisenberg"), group_of("f2_3"), group_of("u4")
    A2 = MalcevGroup(abelian(2))
    return {
        "identity_heisenberg": identity_hom(H),
        "identity_u4": identity_hom(U4),
        "dilation_heisenberg": GroupHom(H, H, [[2, 0, 0], [0, 3, 0]]),
        "shear_heisenberg": GroupHom(H, H, [[1, 0, 1], [0, 1, 0]]),
        "dilation_f2_3": GroupHom(F23, F23, [[2, 0, 0, 0, 0], [0, 2, 0, 0, 0]]),
        "surjection_f2_3_heisenberg": GroupHom(F23, H, H.generators()),
        "embedding_q2_heisenberg": GroupHom(A2, H, [[1, 0, 0], [0, 0, 1]]),
        "quotient_u4_heisenberg": GroupHom(U4, H, [[1, 0, 0], [0, 1, 0], [0, 0, 0]]),
        "mixed_f2_3_u4": GroupHom(F23, U4, [[1, 0, 2, 0, 1, 0], [0, 1, -1, 1, 0, 3]]),
    }
