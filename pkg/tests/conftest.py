def pytest_terminal_summary(terminalreporter):
    from .test_acceptance import RESULTS
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for i in sorted(RESULTS):
        ok, detail, secs = RESULTS[i]
        terminalreporter.write_line(f"criterion {i:2d}: {'PASS' if ok else 'FAIL'} ({secs:.1f}s) {detail}")
