from __future__ import annotations

import sys
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

sys.path.insert(0, str(Path(__file__).parent))

from treesim.tree_core import GameTree, parse_tree  # noqa: E402

ROOT = Path(__file__).resolve().parents[1]
FIXTURES = ROOT / "fixtures"

settings.register_profile(
    "repro",
    derandomize=True,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large],
)
settings.load_profile("repro")


@pytest.fixture(scope="session")
def worked_trees():
    t1 = parse_tree((FIXTURES / "t1.tree").read_text())
    t2 = parse_tree((FIXTURES / "t2.tree").read_text())
    return t1, t2


LABELS = st.sampled_from(["a", "b", "c", "d", "e", "Bc4f7", "Ke1g1", "Pe7e8=Q"])


@st.composite
def trees(draw, max_depth: int = 3, max_children: int = 4, labels=LABELS, rewards: bool = True):
    """Random game trees with distinct sibling labels; leaves may be terminal."""

    def node(label, depth):
        if depth == 0 or draw(st.integers(0, 3)) == 0:
            if rewards and label is not None and draw(st.booleans()):
                r = draw(st.sampled_from([-1.0, 0.0, 1.0, 0.5, -0.25]))
                return GameTree(label, (), r)
            return GameTree(label)
        kids = draw(st.lists(labels, max_size=max_children, unique=True))
        return GameTree(label, tuple(node(k, depth - 1) for k in kids))

    return node(None, draw(st.integers(0, max_depth)))


# one line per acceptance criterion, printed after the run
ACCEPTANCE_LINES: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.write_sep("=", "acceptance criteria")
        for k in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[k])
