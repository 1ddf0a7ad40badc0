"""Alphabets, token strings, and the autoregressive sequence model interface.

An autoregressive sequence model (ASM) assigns, to every finite prefix of
symbols, a probability vector over "next symbol": one entry per alphabet
symbol plus one for the end-of-sequence marker.  Everything else in this
package (finite-state engines, tightness analysis, sampling) is built on
top of this interface.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable

import numpy as np

Token = str
Str = tuple[Token, ...]

DEFAULT_TOL = 1e-9
PROB_SLACK = 1e-12


class OutOfRange(ValueError):
    """A numeric argument fell outside its documented range."""


class UnknownSymbol(ValueError):
    """A token does not belong to the model's alphabet."""

    def __init__(self, token: Token):
        self.token = token
        super().__init__(f"unknown symbol: {token!r}")


class NotADistribution(ValueError):
    """A conditional vector failed validation (negative mass or bad total)."""

    def __init__(self, prefix: Str, total: float, offending: list[tuple[int, float]]):
        self.prefix = prefix
        self.total = total
        self.offending = offending
        parts = [f"conditional at prefix {prefix!r} sums to {total!r}"]
        if offending:
            parts.append(f"negative entries at {offending!r}")
        super().__init__("; ".join(parts))


def as_prob(value: float, slack: float = PROB_SLACK) -> float:
    """Clamp ``value`` into [0, 1], tolerating ``slack`` of rounding past
    either end.  Raises :class:`OutOfRange` beyond that."""
    if not (-slack <= value <= 1.0 + slack):
        raise OutOfRange(f"probability {value!r} outside [0, 1] (slack {slack})")
    return min(max(value, 0.0), 1.0)


@dataclass(frozen=True)
class Alphabet:
    """An ordered set of symbols plus a distinguished end-of-sequence marker.

    ``symbols`` never contains ``eos``; strings are sequences over
    ``symbols`` only.  The marker exists purely so conditional vectors have
    a slot for "stop here".  Probability vectors over the extended alphabet
    are laid out as ``symbols`` in order followed by the EOS slot.

    The degenerate empty alphabet is allowed: it models processes that can
    only generate the empty string (e.g. an n-gram model estimated from a
    corpus containing only empty lines).
    """

    symbols: tuple[Token, ...]
    eos: Token = "EOS"

    def __post_init__(self):
        if len(set(self.symbols)) != len(self.symbols):
            raise ValueError(f"duplicate symbols in alphabet: {self.symbols!r}")
        if self.eos in self.symbols:
            raise ValueError(f"eos marker {self.eos!r} must not be an alphabet symbol")
        object.__setattr__(self, "_index", {s: i for i, s in enumerate(self.symbols)})

    @property
    def size(self) -> int:
        """Number of ordinary symbols (excluding EOS)."""
        return len(self.symbols)

    @property
    def full_size(self) -> int:
        """Length of a conditional vector: symbols plus the EOS slot."""
        return len(self.symbols) + 1

    @property
    def eos_index(self) -> int:
        return len(self.symbols)

    def index(self, token: Token) -> int:
        try:
            return self._index[token]
        except KeyError:
            raise UnknownSymbol(token) from None

    def check_string(self, x: Iterable[Token]) -> Str:
        """Return ``x`` as a tuple after verifying every token is a symbol."""
        x = tuple(x)
        for token in x:
            if token not in self._index:
                raise UnknownSymbol(token)
        return x


class Asm:
    """Autoregressive sequence model: a total map from prefixes to
    conditional next-symbol distributions.

    Subclasses must set ``alphabet`` and implement :meth:`conditional`.
    The incremental interface (:meth:`initial_state` / :meth:`step` /
    :meth:`state_conditional`) exists so models with expensive
    prefix-recomputation (RNNs, forward-weight adapters) can be walked
    symbol by symbol; it must agree with :meth:`conditional`, which remains
    the defining contract.  By default the carried state is the prefix
    itself.

    Instances are immutable; per-call state is caller-owned, so models can
    be shared freely across threads.
    """

    alphabet: Alphabet

    def conditional(self, prefix: Str) -> np.ndarray:
        """Probability vector over the extended alphabet (EOS last)."""
        raise NotImplementedError

    # -- incremental interface -------------------------------------------

    def initial_state(self):
        return ()

    def step(self, state, symbol: Token):
        """Advance the carried state by one generated symbol."""
        return state + (symbol,)

    def state_conditional(self, state) -> np.ndarray:
        return self.conditional(state)

    def state_key(self, state):
        """Hashable key identifying ``state``; equal keys must imply equal
        conditional behaviour from here on.  Used to pool identical states
        during sampling and bound checking."""
        return state


class FunctionAsm(Asm):
    """ASM defined directly by a prefix -> probability-vector function."""

    def __init__(self, alphabet: Alphabet, fn: Callable[[Str], np.ndarray]):
        self.alphabet = alphabet
        self._fn = fn

    def conditional(self, prefix: Str) -> np.ndarray:
        return np.asarray(self._fn(tuple(prefix)), dtype=float)


def validate_conditional(asm: Asm, prefix: Str, tol: float = DEFAULT_TOL) -> None:
    """Check that the conditional vector at ``prefix`` is a distribution.

    Raises :class:`NotADistribution` if any entry is more negative than
    ``tol`` or the total differs from 1 by more than ``tol``.
    """
    vec = np.asarray(asm.conditional(prefix), dtype=float)
    if vec.shape != (asm.alphabet.full_size,):
        raise NotADistribution(prefix, float(vec.sum()), [])
    offending = [(int(i), float(v)) for i, v in enumerate(vec) if v < -tol]
    total = float(vec.sum())
    if offending or abs(total - 1.0) > tol:
        raise NotADistribution(prefix, total, offending)


def string_probability(asm: Asm, x: Iterable[Token]) -> float:
    """Probability that the model generates exactly the string ``x``:
    the product of each symbol's conditional followed by EOS."""
    x = asm.alphabet.check_string(x)
    state = asm.initial_state()
    p = 1.0
    for token in x:
        vec = asm.state_conditional(state)
        p *= float(vec[asm.alphabet.index(token)])
        if p == 0.0:
            return 0.0
        state = asm.step(state, token)
    p *= float(asm.state_conditional(state)[asm.alphabet.eos_index])
    return as_prob(p)


def prefix_probability(asm: Asm, x: Iterable[Token]) -> float:
    """Probability that generation begins with ``x`` (no EOS factor).

    Monotone nonincreasing under extension, and equals the string
    probability plus the prefix probabilities of all one-symbol
    extensions.
    """
    x = asm.alphabet.check_string(x)
    state = asm.initial_state()
    p = 1.0
    for token in x:
        vec = asm.state_conditional(state)
        p *= float(vec[asm.alphabet.index(token)])
        if p == 0.0:
            return 0.0
        state = asm.step(state, token)
    return as_prob(p)
