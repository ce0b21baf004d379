import re


def _criterion_key(label):
    m = re.match(r"(\d+)(.*)", label)
    return int(m.group(1)), m.group(2)


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS

    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for label in sorted(RESULTS, key=_criterion_key):
        ok, title, detail = RESULTS[label]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {label:>3}  {title}: {detail}")
