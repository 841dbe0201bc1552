import pytest

from revmep.encoding import Chromosome, parse_genotype
from revmep.spec import FunctionSpec, plan_embedding, target_columns

# Two published genotypes for 3_17: kind row, then operand rows.
GENOTYPE_1 = """
1  2  3  4  5  6  7
T1 T2 P3 T2 P3 T2 T1
3  3  1  1  2  1  1
-  2  2  3  3  3  -
-  -  3  -  1  -  -
"""

GENOTYPE_2 = """
1  2  3  4  5  6  7
T2 T1 T2 P3 P3 T1 T1
1  3  2  3  2  1  3
3  -  1  2  1  -  -
-  -  -  1  3  -  -
"""

SPEC_317 = (7, 1, 4, 3, 0, 2, 6, 5)


@pytest.fixture
def spec317() -> FunctionSpec:
    return FunctionSpec("3_17", 3, 3, SPEC_317)


@pytest.fixture
def emb317(spec317):
    return plan_embedding(spec317)


@pytest.fixture
def targets317(spec317, emb317):
    return target_columns(spec317, emb317)


@pytest.fixture
def genotype1() -> Chromosome:
    return parse_genotype(GENOTYPE_1, 3)


@pytest.fixture
def genotype2() -> Chromosome:
    return parse_genotype(GENOTYPE_2, 3)


# -- acceptance summary ------------------------------------------------------

_criteria: dict[int, dict] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


def pytest_runtest_makereport(item, call):
    marker = item.get_closest_marker("criterion")
    if marker is None or call.when != "call":
        return
    number, title = marker.args
    entry = _criteria.setdefault(number, {"title": title, "ok": True, "tests": []})
    ok = call.excinfo is None
    entry["ok"] &= ok
    entry["tests"].append((item.name, ok))


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        entry = _criteria[number]
        status = "PASS" if entry["ok"] else "FAIL"
        terminalreporter.write_line(f"criterion {number}: {status}  {entry['title']}")
        for name, ok in entry["tests"]:
            if not ok:
                terminalreporter.write_line(f"    failed: {name}")
