import contextlib

ACCEPTANCE: dict[str, tuple[bool, str]] = {}


@contextlib.contextmanager
def criterion(label: str, what: str):
    """Record PASS/FAIL for an acceptance criterion; failures still propagate."""
    try:
        yield
    except BaseException:
        ACCEPTANCE[label] = (False, what)
        raise
    ACCEPTANCE[label] = (True, what)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for label in sorted(ACCEPTANCE, key=lambda s: [int(p) if p.isdigit() else p for p in s.replace("(", " ").split()]):
        ok, what = ACCEPTANCE[label]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {label}: {what}")
