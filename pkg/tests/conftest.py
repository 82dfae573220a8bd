import acceptance_log


def pytest_terminal_summary(terminalreporter):
    if acceptance_log.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in sorted(acceptance_log.RESULTS, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)
