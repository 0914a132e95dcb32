import os

import pytest

from rht.cdga import CDGA, presented_quotient_table
from rht.graded import make_context

DATA = os.path.join(os.path.dirname(__file__), "..", "src", "rht", "data")

# Acceptance verdict lines, filled by tests/test_acceptance.py and printed at the end.
ACCEPTANCE = []


def record(label: str, ok: bool, detail: str = ""):
    ACCEPTANCE.append((label, ok, detail))


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for label, ok, detail in ACCEPTANCE:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {label}" + (f"  [{detail}]" if detail else ""))


def data_path(name):
    return os.path.join(DATA, name)


def heisenberg():
    ctx = make_context([("x", 1), ("y", 1), ("z", 1)])
    x, y = ctx.gen("x"), ctx.gen("y")
    return CDGA(ctx, {"x": 0, "y": 0, "z": x * y}, name="heisenberg")


def sphere_even(k=2, name="s2"):
    ctx = make_context([("a", k), ("b", 2 * k - 1)])
    return CDGA(ctx, {"a": 0, "b": ctx.gen("a") ** 2}, name=name)


def sphere_odd(k=3, name="s3"):
    ctx = make_context([("u", k)])
    return CDGA(ctx, {"u": 0}, name=name)


def filiform():
    """A 5-dimensional nilpotent Lie algebra (Chevalley-Eilenberg complex)."""
    ctx = make_context([(f"e{i}", 1) for i in range(1, 6)])
    e = [None] + [ctx.gen(f"e{i}") for i in range(1, 6)]
    return CDGA(ctx, {"e1": 0, "e2": 0, "e3": e[1] * e[2], "e4": e[1] * e[3], "e5": e[1] * e[4]},
                name="filiform")


def truncated_poly(scale=1):
    """Q[x]/x^3 with |x| = 2 and x * x = scale^2 * vol."""
    return presented_quotient_table([("one", 0), ("x", 2), ("vol", 4)], [], [("x", "x", scale * scale)], 4,
                                    name="cp2")


@pytest.fixture
def H():
    return heisenberg()
