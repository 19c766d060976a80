from __future__ import annotations

import numpy as np
import pytest

_ACCEPTANCE: list[str] = []


def record_criterion(label: str, ok: bool, detail: str) -> None:
    _ACCEPTANCE.append(f"[{'PASS' if ok else 'FAIL'}] {label}: {detail}")


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE:
            terminalreporter.write_line(line)


def random_upper(d: int, rng: np.random.Generator, complex_: bool = True) -> np.ndarray:
    arr = rng.normal(size=(d, d))
    if complex_:
        arr = arr + 1j * rng.normal(size=(d, d))
    arr = np.triu(arr)
    return arr / np.linalg.norm(arr)


def random_state(d: int, rng: np.random.Generator) -> np.ndarray:
    arr = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    return arr / np.linalg.norm(arr)


def random_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    z = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


@pytest.fixture
def rng():
    return np.random.default_rng(20240917)
