"""Acceptance gate: every golden criterion at its stated tolerance.

Each test prints one pass/fail line (visible with `pytest -s` or in captured
output) and asserts the criterion.  The same checks back the CLI `verify`
subcommand.
"""

from magrad import verify


def _run(name):
    fn = dict(verify.CHECKS)[name]
    passed, detail = fn()
    print(f"{'PASS' if passed else 'FAIL'}  {name}  {detail}")
    assert passed, f"{name}: {detail}"


def test_criterion_01_exact_theta():
    _run("01-exact-theta")


def test_criterion_02_kernel4_formulas():
    _run("02-kernel4-formulas")


def test_criterion_03_cayley_constants():
    _run("03-cayley-constants")


def test_criterion_04_log_bounds():
    _run("04-log-bounds")


def test_criterion_05_plain_closed_form():
    _run("05-plain-closed-form")


def test_criterion_06_euler_ode():
    _run("06-euler-ode")


def test_criterion_07_plain_kernel_oracle():
    _run("07-plain-kernel-oracle")


def test_criterion_08_maglower_identity():
    _run("08-maglower-identity")


def test_criterion_09_bch_threshold():
    _run("09-bch-threshold")


def test_criterion_10_block_component():
    _run("10-block-component")


def test_criterion_11_appendix_machinery():
    _run("11-appendix-machinery")


def test_criterion_12_convexity_sampling():
    _run("12-convexity-sampling")
