import numpy as np
import pytest

from faashodge import build_complex, incidence_matrices


def triangle_doc(filled=False, isolated=0):
    doc = {
        "vertices": [{"id": v, "label": v} for v in "abc"],
        "edges": [
            {"id": "e0", "tail": "a", "head": "b", "label": ""},
            {"id": "e1", "tail": "b", "head": "c", "label": ""},
            {"id": "e2", "tail": "a", "head": "c", "label": ""},
        ],
        "faces": [],
    }
    doc["vertices"] += [{"id": f"iso{i}", "label": ""} for i in range(isolated)]
    if filled:
        doc["faces"].append({
            "id": "phi0",
            "boundary": [{"edge": "e0", "sign": 1}, {"edge": "e1", "sign": 1},
                         {"edge": "e2", "sign": -1}],
            "label": "saga",
        })
    return doc


@pytest.fixture
def open_triangle():
    return build_complex(triangle_doc())


@pytest.fixture
def filled_triangle():
    return build_complex(triangle_doc(filled=True))


@pytest.fixture
def open_B(open_triangle):
    return incidence_matrices(open_triangle)


@pytest.fixture
def filled_B(filled_triangle):
    return incidence_matrices(filled_triangle)


@pytest.fixture
def rng():
    return np.random.default_rng(20261015)


_ACCEPTANCE: dict[str, tuple[str, str]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    number, title = marker.args
    if rep.when == "call" or (rep.when == "setup" and rep.outcome != "passed"):
        prev = _ACCEPTANCE.get(number, (title, "PASS"))[1]
        status = "PASS" if rep.outcome == "passed" and prev == "PASS" else "FAIL"
        _ACCEPTANCE[number] = (title, status)


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_ACCEPTANCE, key=lambda n: (int(n.rstrip("abcd")), n)):
        title, status = _ACCEPTANCE[number]
        terminalreporter.write_line(f"[{status}] criterion {number}: {title}")
