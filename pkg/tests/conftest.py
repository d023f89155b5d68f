import pytest


@pytest.fixture(scope="session")
def desk():
    from dioph.kaufman_measure import desk_scheme
    return desk_scheme()


ACCEPTANCE = {}


@pytest.fixture(scope="session")
def record():
    """Record one acceptance line: ``record(k, ok, detail)``."""
    def _rec(k, ok, detail=""):
        line = f"criterion {k:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
        ACCEPTANCE[k] = line
        print(line)
        return ok
    return _rec


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for k in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[k])
