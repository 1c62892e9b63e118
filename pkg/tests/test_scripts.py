import os
import subprocess
import sys

import pytest

ROOT = os.path.join(os.path.dirname(__file__), os.pardir)


@pytest.mark.parametrize(
    "argv",
    [
        ["scripts/aggregation_study.py", "--trials", "20"],
        ["scripts/rule_comparison.py", "models/energy_transition.json"],
        ["scripts/symmetric_ties.py", "--descriptors", "3", "--timespans", "2"],
    ],
)
def test_script_runs(argv):
    proc = subprocess.run([sys.executable, *argv], cwd=ROOT, capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    assert proc.stdout.strip()


def test_aggregation_study_single_overlap_sound():
    sys.path.insert(0, os.path.join(ROOT, "scripts"))
    try:
        import aggregation_study
    finally:
        sys.path.pop(0)
    rows = aggregation_study.run(aggregation_study.StudyConfig(trials=30, overlaps=(1,)))
    assert rows[0][2] == 0
