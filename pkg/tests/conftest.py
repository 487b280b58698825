"""Shared pytest wiring: a visible per-criterion acceptance summary."""

_acceptance_results: dict[str, str] = {}


def pytest_runtest_logreport(report):
    if report.when != "call":
        return
    name = report.nodeid.rsplit("::", 1)[-1]
    if name.startswith("test_criterion_"):
        if report.passed:
            verdict = "PASS"
        elif report.skipped:
            verdict = "SKIP"
        else:
            verdict = "FAIL"
        _acceptance_results[name] = verdict


def pytest_terminal_summary(terminalreporter):
    if not _acceptance_results:
        return
    terminalreporter.section("acceptance criteria")
    for name, verdict in sorted(_acceptance_results.items()):
        label = name.removeprefix("test_criterion_")
        terminalreporter.write_line(f"criterion {label}: {verdict}")
