"""Exit criteria, one test per criterion.

Each test executes the corresponding acceptance check at its pinned
tolerance and prints a single pass/fail line (visible with `pytest -s` or
in the captured output of a failing run).  `gibbslab verify acceptance`
runs the same checks from the command line.
"""

import pytest

from gibbslab.acceptance import CRITERIA, format_line, run_criterion

NAMES = {
    1: "complexity oracle equivalence",
    2: "closed-form checks",
    3: "high-temperature dominance",
    4: "zero-temperature limit",
    5: "bound soundness (relative entropy)",
    6: "stratified sub-Gaussian soundness",
    7: "CDF concentration",
    8: "margin identities",
    9: "monotone-density equivalence and soundness",
    10: "divergence inverse round-trip",
    11: "run determinism",
    12: "phase-diagram shape",
}


@pytest.mark.parametrize("number", sorted(CRITERIA))
def test_criterion(number):
    result = run_criterion(number)
    print(format_line(result))
    assert result.name == NAMES[number]
    assert result.passed, format_line(result)
