import numpy as np
import pytest

from loovar import ModelConfig

REFERENCE_MODEL = ModelConfig(1.44, 4.0)

_acceptance_lines = []


@pytest.fixture
def criterion():
    """Record a pass/fail line for an acceptance criterion, then assert it."""

    def check(label, ok, detail=""):
        _acceptance_lines.append(f"[{'PASS' if ok else 'FAIL'}] {label}" + (f"  ({detail})" if detail else ""))
        assert ok, f"{label}: {detail}"

    return check


def pytest_terminal_summary(terminalreporter):
    if _acceptance_lines:
        terminalreporter.section("acceptance criteria")
        for line in _acceptance_lines:
            terminalreporter.write_line(line)


def mc_batches(sampler, reps, n, seed, chunk=100_000):
    """Yield (chunk, n) arrays from a single seeded generator."""
    rng = np.random.default_rng(seed)
    done = 0
    while done < reps:
        m = min(chunk, reps - done)
        yield sampler(rng, (m, n))
        done += m


def z_score(samples, target):
    samples = np.asarray(samples)
    se = samples.std(ddof=1) / np.sqrt(samples.size)
    return (samples.mean() - target) / se
