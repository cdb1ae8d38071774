import subprocess
import sys

import pytest


def run_simulator(args, cwd):
    """Invoke the simulator CLI; the CSV files are the only interface used."""
    proc = subprocess.run(
        [sys.executable, "-m", "rotor_ratchet.cli", *args],
        cwd=cwd,
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0, proc.stderr
    return proc


@pytest.fixture(scope="session")
def acceptance_csvs(tmp_path_factory):
    """CSV set matching the simulator's acceptance-run parameters."""
    root = tmp_path_factory.mktemp("csvs")
    run_simulator(
        ["scaling-curve", "--x-max", "20", "--steps", "401", "-o", "scaling_curve.csv"],
        root,
    )
    run_simulator(
        [
            "collapse", "--combos", "1.8:0.18,0.9:0.36,3.6:0.09",
            "--ell", "1", "--gamma", "-1.5707963267948966", "--beta", "0.5",
            "--kicks", "18", "-o", "collapse.csv",
        ],
        root,
    )
    run_simulator(
        [
            "tau-scan", "--taus", "0.3,3.141592653589793,5.983185307179586",
            "--phi-d", "1.8", "--gamma", "-1.5707963267948966", "--beta", "0.5",
            "--kicks", "12", "-o", "tau_scan.csv",
        ],
        root,
    )
    run_simulator(
        [
            "quantum", "--phi-d", "1.8", "--epsilon", "0.18", "--ell", "1",
            "--gamma", "-1.5707963267948966", "--beta", "0.5", "--kicks", "8",
            "-o", "distributions.csv",
        ],
        root,
    )
    run_simulator(
        [
            "ratchet", "--phi-d", "1.8", "--epsilon", "0.18", "--ell", "1",
            "--gamma", "-1.5707963267948966", "--beta", "0.5", "--kicks", "18",
            "-o", "trajectory.csv",
        ],
        root,
    )
    return root
