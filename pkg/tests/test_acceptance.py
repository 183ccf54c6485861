"""Acceptance suite: runs every verification criterion at its stated
tolerance and prints one PASS/FAIL line per criterion.

The same criteria back the `rotorkin verify` subcommand; here each one is
a separate test so a regression pinpoints itself.
"""

import subprocess
import sys

import pytest

from rotorkin import verify

_RESULTS = {}


def _run(cid):
    if cid not in _RESULTS:
        runner = dict((c, fn) for c, _, fn in verify.CRITERIA)[cid]
        _RESULTS[cid] = runner(None)
    result = _RESULTS[cid]
    print(result.line(), result.detail)
    return result


@pytest.mark.parametrize("cid", [cid for cid, _, _ in verify.CRITERIA])
def test_criterion(cid):
    result = _run(cid)
    assert result.passed, result.line() + " " + result.detail
    assert result.cid == cid


def test_verify_cli_exits_zero_on_subset():
    # full `verify` is exercised criterion-by-criterion above; the CLI exit
    # path is checked on the cheap ellipse-tagged subset
    proc = subprocess.run(
        [sys.executable, "-m", "rotorkin.cli", "verify", "--filter", "ellipse"],
        capture_output=True, text=True)
    assert proc.returncode == 0, proc.stdout + proc.stderr
    lines = proc.stdout.strip().splitlines()
    assert len(lines) == 3
    assert all(line.startswith("PASS") for line in lines)
