"""The randomized identity suite must pass wholesale and be reproducible."""

from spinvl.identities import ALL_CHECKS, run_identity_suite


def test_suite_passes():
    checks = run_identity_suite()
    assert len(checks) == len(ALL_CHECKS)
    for c in checks:
        assert c.passed, f"{c.name}: {c.max_error:.3e} > {c.tolerance:.1e}"


def test_suite_is_seeded():
    a = run_identity_suite(seed=123)
    b = run_identity_suite(seed=123)
    assert [x.max_error for x in a] == [y.max_error for y in b]


def test_check_report_format():
    c = run_identity_suite()[0]
    text = str(c)
    assert text.startswith("[pass]") or text.startswith("[FAIL]")
    assert c.name in text
