import pytest

from curvecount import build_surface


@pytest.fixture(scope="session")
def g2():
    return build_surface(2)[1]


@pytest.fixture(scope="session")
def g3():
    return build_surface(3)[1]


@pytest.fixture(scope="session")
def acceptance(request):
    """Collects one verdict line per acceptance criterion; printed in the terminal summary."""
    log = request.config.__dict__.setdefault("_acceptance_lines", {})

    def record(n, ok, detail):
        line = f"criterion {n}: {'PASS' if ok else 'FAIL'} | {detail}"
        log[n] = line
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = getattr(config, "_acceptance_lines", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for n in sorted(lines):
            terminalreporter.write_line(lines[n])
