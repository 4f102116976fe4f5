import json
from importlib import resources

import pytest

from servmine.model import (
    Condition,
    EnvConstraint,
    Location,
    OperationDescription,
    Parameter,
    Person,
    ServiceDescription,
    StateRecord,
    repository_from_document,
)

HOME = Location(0.0, 0.0, 100.0)


def data_doc(name):
    return json.loads(resources.files("servmine").joinpath(f"data/{name}.json").read_text("utf-8"))


def make_service(
    name,
    *,
    active=None,
    location=HOME,
    people=(),
    pre=(),
    post=(),
    inputs=(),
    outputs=(),
    pre_env=(),
    post_env=(),
):
    """One-operation service; ``pre``/``post`` are token sets, ``inputs``/``outputs`` type tags."""
    op = OperationDescription(
        name="op",
        inputs=tuple(Parameter(f"i{n}", t) for n, t in enumerate(inputs)),
        outputs=tuple(Parameter(f"o{n}", t) for n, t in enumerate(outputs)),
        precondition=Condition(env_constraints=tuple(pre_env), tokens=frozenset(pre)),
        postcondition=Condition(env_constraints=tuple(post_env), tokens=frozenset(post)),
    )
    states = ()
    if active is not None:
        states = (StateRecord("active", active[0], active[1], location),)
    return ServiceDescription(
        name=name, operations=(op,), states=states, people=frozenset(Person(p) for p in people)
    )


def all_ones_pair():
    a = make_service("a", active=(0, 10), people="X", post={1}, pre={2}, outputs=["t1"], inputs=["t2"])
    b = make_service("b", active=(5, 15), people="X", post={2}, pre={1}, outputs=["t2"], inputs=["t1"])
    return [a, b]


@pytest.fixture
def smart_home():
    return repository_from_document(data_doc("smart_home"))


@pytest.fixture
def air_conditioner():
    return repository_from_document(data_doc("air_conditioner"))[0]


@pytest.fixture
def stove_ac():
    stove = make_service("stove", post_env=[EnvConstraint("temperature", "geq", 28.0)])
    ac = make_service("air-conditioner", pre_env=[EnvConstraint("temperature", "geq", 28.0)])
    return stove, ac


# ---------------------------------------------------------------------------
# acceptance reporting: one PASS/FAIL line per criterion

_criteria = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(num, text): acceptance criterion id")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    num, text = marker.args
    prev = _criteria.get(num, (text, True))
    if rep.when == "call" or rep.failed:
        _criteria[num] = (text, prev[1] and rep.passed)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_criteria):
        text, ok = _criteria[num]
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] criterion {num}: {text}")
