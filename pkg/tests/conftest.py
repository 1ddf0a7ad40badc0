"""Shared fixtures: seeded random models and small enumeration helpers."""

import hashlib
import itertools

import numpy as np
import pytest

from seqtight import Alphabet, Asm, Sfssm, build_sfssm, useful_states
from seqtight.modelfile import BUILTINS

SYMBOL_POOL = ("a", "b", "c")


def random_sfssm(rng: np.random.Generator, max_states: int = 5, max_symbols: int = 3,
                 ensure_useful: bool = True) -> Sfssm:
    """Sparse random model; sparsity produces a healthy mix of tight and
    non-tight instances (and occasionally states that cannot stop)."""
    while True:
        q = int(rng.integers(1, max_states + 1))
        k = int(rng.integers(1, max_symbols + 1))
        symbols = SYMBOL_POOL[:k]
        trans = {a: np.zeros((q, q)) for a in symbols}
        term = np.zeros(q)
        for i in range(q):
            cells: list[tuple[str | None, int | None]] = []
            if rng.random() < 0.35:
                cells.append((None, None))  # termination event
            for a in symbols:
                for j in range(q):
                    if rng.random() < 0.3:
                        cells.append((a, j))
            if not cells:
                cells.append((None, None))
            weights = rng.random(len(cells)) + 0.05
            weights /= weights.sum()
            for (a, j), w in zip(cells, weights):
                if a is None:
                    term[i] = w
                else:
                    trans[a][i, j] = w
        init = np.zeros(q)
        if q > 1 and rng.random() < 0.3:
            spread = rng.random(q) * (rng.random(q) < 0.5)
            if spread.sum() == 0:
                spread[int(rng.integers(0, q))] = 1.0
            init = spread / spread.sum()
        else:
            init[int(rng.integers(0, q))] = 1.0
        model = build_sfssm(Alphabet(symbols), trans, init, term)
        if not ensure_useful or useful_states(model):
            return model


def random_corpus(rng: np.random.Generator, max_strings: int = 20,
                  max_len: int = 8, max_symbols: int = 3) -> list[tuple[str, ...]]:
    k = int(rng.integers(1, max_symbols + 1))
    symbols = SYMBOL_POOL[:k]
    count = int(rng.integers(1, max_strings + 1))
    return [tuple(rng.choice(symbols, size=int(rng.integers(0, max_len + 1))))
            for _ in range(count)]


def strings_up_to(symbols, max_len):
    """Every string over ``symbols`` with length at most ``max_len``."""
    for n in range(max_len + 1):
        yield from itertools.product(symbols, repeat=n)


class StableRandomAsm(Asm):
    """Deterministic pseudo-random ASM: the conditional at each prefix is a
    Dirichlet draw keyed by a stable hash of (seed, prefix)."""

    def __init__(self, alphabet: Alphabet, seed: int, eos_floor: float = 0.0):
        self.alphabet = alphabet
        self.seed = seed
        self.eos_floor = eos_floor

    def conditional(self, prefix):
        key = hashlib.sha256(f"{self.seed}|{'|'.join(prefix)}".encode()).digest()
        rng = np.random.default_rng(int.from_bytes(key[:8], "little"))
        vec = rng.dirichlet(np.ones(self.alphabet.full_size))
        if self.eos_floor > 0.0:
            vec = vec * (1.0 - self.eos_floor)
            vec[-1] += self.eos_floor
        return vec


@pytest.fixture(scope="session")
def fig1a():
    return BUILTINS["fig1a"]()


@pytest.fixture(scope="session")
def fig1b():
    return BUILTINS["fig1b"]()
