import pytest

from drivenjc.scenario import build_config, run

ACCEPTANCE_RESULTS = []


@pytest.fixture(scope="session")
def scenario_run(tmp_path_factory):
    """Run a scenario once per session (CSV files written to a temp dir)."""
    cache = {}

    def get(preset=None, **overrides):
        key = (preset, tuple(sorted(overrides.items())))
        if key not in cache:
            out = tmp_path_factory.mktemp(preset or "custom")
            cache[key] = run(build_config(preset=preset, output_dir=out, **overrides))
        return cache[key]

    return get


@pytest.fixture
def criterion():
    def record(number, title, passed, detail=""):
        ACCEPTANCE_RESULTS.append((number, title, bool(passed), detail))
        return bool(passed)

    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number, title, passed, detail in sorted(ACCEPTANCE_RESULTS, key=lambda r: r[0]):
        status = "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"[{status}] {number:>2}. {title}: {detail}")


def pytest_collection_modifyitems(items):
    # anything touching a full scenario run takes minutes
    for item in items:
        if "scenario_run" in getattr(item, "fixturenames", ()):
            item.add_marker(pytest.mark.slow)
