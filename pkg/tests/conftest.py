import pytest
from hypothesis import strategies as st

from robustcall.model import AttributeSchema, Dataset

SAMPLE_ROWS = [
    (("Fri[S1]", "Office", "Meeting", "Friend"), "Reject"),
    (("Fri[S1]", "Office", "Meeting", "Colleague"), "Reject"),
    (("Fri[S1]", "Office", "Meeting", "Boss"), "Accept"),
    (("Fri[S1]", "Office", "Meeting", "Friend"), "Reject"),
    (("Fri[S2]", "Home", "Dinner", "Friend"), "Accept"),
    (("Wed[S1]", "Office", "Seminar", "Unknown"), "Reject"),
    (("Wed[S1]", "Office", "Seminar", "Colleague"), "Reject"),
    (("Wed[S1]", "Office", "Seminar", "Mother"), "Accept"),
    (("Wed[S2]", "Home", "Dinner", "Unknown"), "Accept"),
]

SAMPLE_SCHEMA = AttributeSchema(
    ("DayTime", "Location", "Situation", "Relationship"),
    (
        ("Fri[S1]", "Fri[S2]", "Wed[S1]", "Wed[S2]"),
        ("Office", "Home"),
        ("Meeting", "Seminar", "Dinner"),
        ("Friend", "Colleague", "Boss", "Mother", "Unknown"),
    ),
    ("Reject", "Accept"),
)


@pytest.fixture
def sample() -> Dataset:
    return Dataset(SAMPLE_SCHEMA, tuple(r for r, _ in SAMPLE_ROWS), tuple(l for _, l in SAMPLE_ROWS))


@st.composite
def small_datasets(draw, max_n=12, max_attrs=4, max_values=4, max_classes=4, min_n=1):
    """Random categorical datasets at desk scale, labels drawn from a 2-4 class set."""
    m = draw(st.integers(0, max_attrs))
    sizes = [draw(st.integers(1, max_values)) for _ in range(m)]
    k = draw(st.integers(2, max_classes))
    classes = tuple(f"C{i}" for i in range(k))
    schema = AttributeSchema(
        tuple(f"A{a}" for a in range(m)),
        tuple(tuple(f"v{j}" for j in range(s)) for s in sizes),
        classes,
    )
    n = draw(st.integers(min_n, max_n))
    rows = tuple(tuple(f"v{draw(st.integers(0, s - 1))}" for s in sizes) for _ in range(n))
    labels = tuple(classes[draw(st.integers(0, k - 1))] for _ in range(n))
    return Dataset(schema, rows, labels)


# -- acceptance reporting -----------------------------------------------------

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
