"""
Integration test configuration and fixtures.

Provides a CLI runner and seeded instance batches for the acceptance suites.
"""
import json

import pytest

from app.main import main
from app.models.instance import Mode
from app.services.generator import Family, generate_instance
from app.utils.rng import make_rng


@pytest.fixture
def run_cli(capsys):
    """
    Run the CLI in-process.

    Returns:
        Callable mapping argv to (exit code, stdout, stderr)
    """

    def _run(*argv: str):
        code = main([str(a) for a in argv])
        captured = capsys.readouterr()
        return code, captured.out, captured.err

    return _run


@pytest.fixture
def run_cli_json(run_cli):
    """Run the CLI and parse stdout as JSON."""

    def _run(*argv: str):
        code, out, err = run_cli(*argv)
        assert code == 0, err
        return json.loads(out)

    return _run


@pytest.fixture
def instance_batch():
    """
    Seeded Gaussian instances with random sizes.

    Usage:
        for seed, inst in instance_batch(count=30, max_m=3, max_n=8, max_k=4): ...
    """

    def _make(count: int, max_m: int, max_n: int, max_k: int, mode: Mode = Mode.WITHOUT_REPS, base_seed: int = 0):
        for i in range(count):
            seed = base_seed + i
            rng = make_rng(seed)
            m = int(rng.integers(1, max_m + 1))
            k = int(rng.integers(m, max_k + 1))
            n = int(rng.integers(k, max(max_n, k) + 1))
            yield seed, generate_instance(m, n, k, mode, Family.GAUSSIAN, seed)

    return _make
