"""Shared test helpers.

oracle_fidelity is the independent route: it goes through numpy's LAPACK
eigensolver and never touches the package's Jacobi implementation, so any
agreement between the two is meaningful.
"""
from __future__ import annotations

import numpy as np
import pytest


def oracle_fidelity(rho1: np.ndarray, rho2: np.ndarray) -> float:
    w, v = np.linalg.eigh(rho1)
    w = np.clip(w, 0.0, None)
    root = (v * np.sqrt(w)) @ v.conj().T
    inner = root @ rho2 @ root
    inner = 0.5 * (inner + inner.conj().T)
    lam = np.clip(np.linalg.eigvalsh(inner), 0.0, None)
    return float(np.sum(np.sqrt(lam)) ** 2)


def oracle_trace_distance(rho1: np.ndarray, rho2: np.ndarray) -> float:
    diff = rho1 - rho2
    diff = 0.5 * (diff + diff.conj().T)
    return 0.5 * float(np.sum(np.abs(np.linalg.eigvalsh(diff))))


def random_density(rng: np.random.Generator, dim: int) -> np.ndarray:
    raw = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    rho = raw @ raw.conj().T
    return rho / np.trace(rho).real


def random_hermitian(rng: np.random.Generator, dim: int) -> np.ndarray:
    raw = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return raw + raw.conj().T


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20260814)
