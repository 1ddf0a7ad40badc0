"""Concrete sequence-model instances.

Ships two one-dimensional softmax RNNs that bracket the interesting
behaviour — one whose end-of-sequence probability decays geometrically
(and therefore leaks mass to endless runs) and one whose EOS probability
decays harmonically (and terminates with probability one) — plus a parity
model whose EOS probability vanishes on odd steps yet still terminates,
and an adapter exposing any stochastic finite-state model through the
generic ASM interface.

Step convention used throughout: the conditional for generation step
``t`` (1-based) is computed from the hidden state reached after the
``t - 1`` symbols generated so far.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import Alphabet, Asm, OutOfRange, Str, Token
from .sfssm import Sfssm


class DeadPrefix(ValueError):
    """Conditional requested at a prefix the model generates with probability 0."""

    def __init__(self, prefix: Str | None):
        self.prefix = prefix
        where = repr(prefix) if prefix is not None else "the walked prefix"
        super().__init__(f"prefix has probability zero: {where}")


def softmax(logits: np.ndarray) -> np.ndarray:
    """Softmax with max-subtraction so large hidden states cannot overflow."""
    z = np.asarray(logits, dtype=float)
    z = z - z.max()
    e = np.exp(z)
    return e / e.sum()


_ACTIVATIONS = {
    "relu": lambda x: np.maximum(x, 0.0),
    "softplus": lambda x: np.logaddexp(x, 0.0),
    "tanh": np.tanh,
    "sigmoid": lambda x: 1.0 / (1.0 + np.exp(-x)),
}


@dataclass(frozen=True)
class RnnAsm(Asm):
    """Simple recurrent sequence model with a softmax output layer.

    The hidden state evolves as ``h' = act(W_in @ v[x] + W_rec @ h + bias)``
    where ``v[x]`` is the input embedding of the consumed symbol, and the
    conditional distribution is ``softmax(U @ h)`` over the output
    embeddings ``U`` (one row per symbol, EOS last).  Softmax outputs are
    strictly positive, so every prefix is live.
    """

    alphabet: Alphabet
    input_embedding: np.ndarray      # (|symbols|+1, d), EOS row last
    output_embedding: np.ndarray     # (|symbols|+1, d), EOS row last
    input_weights: np.ndarray        # (d, d)
    recurrent_weights: np.ndarray    # (d, d)
    bias: np.ndarray                 # (d,)
    activation: str
    initial_hidden: np.ndarray       # (d,)

    def __post_init__(self):
        d = len(self.initial_hidden)
        full = self.alphabet.full_size
        for name in ("input_embedding", "output_embedding", "input_weights",
                     "recurrent_weights", "bias", "initial_hidden"):
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=float))
        if self.activation not in _ACTIVATIONS:
            raise ValueError(f"unknown activation {self.activation!r}; "
                             f"choose from {sorted(_ACTIVATIONS)}")
        shapes = {
            "input_embedding": (full, d),
            "output_embedding": (full, d),
            "input_weights": (d, d),
            "recurrent_weights": (d, d),
            "bias": (d,),
        }
        for name, want in shapes.items():
            got = getattr(self, name).shape
            if got != want:
                raise ValueError(f"{name} has shape {got}, expected {want}")

    @property
    def hidden_dim(self) -> int:
        return len(self.initial_hidden)

    def conditional(self, prefix: Str) -> np.ndarray:
        h = self.initial_hidden
        for token in prefix:
            h = rnn_step(self, h, token)
        return rnn_conditional(self, h)

    def initial_state(self):
        return self.initial_hidden

    def step(self, state, symbol: Token):
        return rnn_step(self, state, symbol)

    def state_conditional(self, state) -> np.ndarray:
        return rnn_conditional(self, state)

    def state_key(self, state):
        return tuple(np.asarray(state).ravel().tolist())

    def output_gap(self) -> float:
        """Largest distance between a symbol's output embedding and the EOS
        output embedding; the constant paired with hidden-state norms in
        the log-bound tightness test."""
        eos_row = self.output_embedding[-1]
        gaps = np.linalg.norm(self.output_embedding[:-1] - eos_row, axis=1)
        return float(gaps.max()) if len(gaps) else 0.0


def rnn_step(m: RnnAsm, h: np.ndarray, symbol: Token) -> np.ndarray:
    """One recurrence update: consume ``symbol`` from hidden state ``h``."""
    idx = m.alphabet.index(symbol) if symbol != m.alphabet.eos else m.alphabet.eos_index
    v = m.input_embedding[idx]
    pre = m.input_weights @ v + m.recurrent_weights @ np.asarray(h, dtype=float) + m.bias
    return _ACTIVATIONS[m.activation](pre)


def rnn_conditional(m: RnnAsm, h: np.ndarray) -> np.ndarray:
    """Softmax over output-embedding logits; strictly positive, sums to 1."""
    logits = m.output_embedding @ np.asarray(h, dtype=float)
    return softmax(logits)


def make_nontight_relu_rnn() -> RnnAsm:
    """One-symbol ReLU RNN whose hidden scalar counts the symbols consumed.

    With unit input embedding and weights (zero bias), consuming ``a``
    maps ``h`` to ``relu(h + 1)``, so the hidden value after ``k`` symbols
    is exactly ``k`` and the EOS probability at step ``t`` is
    ``1 / (e^(t-1) + 1)``.  That decays geometrically, fast enough that
    generation runs forever with probability about 0.298: the model is
    non-tight even though EOS is possible at every step.
    """
    alphabet = Alphabet(("a",))
    emb = np.array([[1.0], [0.0]])  # a, EOS
    return RnnAsm(
        alphabet=alphabet,
        input_embedding=emb,
        output_embedding=emb,
        input_weights=np.array([[1.0]]),
        recurrent_weights=np.array([[1.0]]),
        bias=np.array([0.0]),
        activation="relu",
        initial_hidden=np.array([0.0]),
    )


def make_tight_softplus_rnn() -> RnnAsm:
    """One-symbol softplus RNN whose hidden scalar grows like log(k + 1).

    The recurrence ignores the input (zero input weights) and applies
    softplus to the hidden value, so ``h`` after ``k`` symbols is
    ``log(k + 1)`` and the EOS probability at step ``t`` is
    ``1 / (t + 1)``.  The EOS series diverges harmonically, so the model
    terminates with probability one despite EOS probability tending to 0.
    """
    alphabet = Alphabet(("a",))
    emb = np.array([[1.0], [0.0]])
    return RnnAsm(
        alphabet=alphabet,
        input_embedding=emb,
        output_embedding=emb,
        input_weights=np.array([[0.0]]),
        recurrent_weights=np.array([[1.0]]),
        bias=np.array([0.0]),
        activation="softplus",
        initial_hidden=np.array([0.0]),
    )


class ParityAsm(Asm):
    """EOS is possible only at even generation steps.

    Demonstrates that a positive EOS floor at *every* step is not needed
    for termination: the even-step hazard alone already sums to infinity.
    Non-EOS mass is spread uniformly over the alphabet; only the EOS
    schedule matters for termination behaviour.
    """

    def __init__(self, eos_prob_even: float = 0.1, alphabet: Alphabet | None = None):
        if not (0.0 < eos_prob_even < 1.0):
            raise OutOfRange(f"eos_prob_even must be strictly inside (0, 1), got {eos_prob_even!r}")
        self.eos_prob_even = eos_prob_even
        self.alphabet = alphabet if alphabet is not None else Alphabet(("a", "b"))

    def conditional(self, prefix: Str) -> np.ndarray:
        return self.state_conditional(len(prefix))

    def initial_state(self):
        return 0

    def step(self, state, symbol: Token):
        return state + 1

    def state_conditional(self, consumed: int) -> np.ndarray:
        step_number = consumed + 1
        eos = self.eos_prob_even if step_number % 2 == 0 else 0.0
        vec = np.full(self.alphabet.full_size, (1.0 - eos) / self.alphabet.size)
        vec[-1] = eos
        return vec


def make_parity_asm(p_even: float = 0.1, alphabet: Alphabet | None = None) -> ParityAsm:
    return ParityAsm(eos_prob_even=p_even, alphabet=alphabet)


class SfssmAsm(Asm):
    """Any stochastic finite-state model viewed through the ASM interface.

    The carried state is the normalized forward state distribution; the
    conditional for symbol ``a`` is the one-step mass routed through
    ``trans[a]`` and the EOS entry is the dot product with the termination
    vector.  Prefixes the model cannot generate have no conditional and
    raise :class:`DeadPrefix`.
    """

    def __init__(self, model: Sfssm):
        self.model = model
        self.alphabet = model.alphabet

    def conditional(self, prefix: Str) -> np.ndarray:
        prefix = self.alphabet.check_string(prefix)
        alpha = np.asarray(self.model.init, dtype=float)
        for token in prefix:
            alpha = alpha @ self.model.trans[token]
        mass = float(alpha.sum())
        if mass <= 0.0:
            raise DeadPrefix(prefix)
        return self._conditional_from_alpha(alpha / mass)

    def initial_state(self):
        return np.asarray(self.model.init, dtype=float)

    def step(self, state, symbol: Token):
        alpha = np.asarray(state, dtype=float) @ self.model.trans[symbol]
        mass = float(alpha.sum())
        if mass <= 0.0:
            raise DeadPrefix(None)
        return alpha / mass

    def state_conditional(self, state) -> np.ndarray:
        alpha = np.asarray(state, dtype=float)
        mass = float(alpha.sum())
        if mass <= 0.0:
            raise DeadPrefix(None)
        return self._conditional_from_alpha(alpha / mass)

    def state_key(self, state):
        return tuple(np.asarray(state).ravel().tolist())

    def _conditional_from_alpha(self, alpha: np.ndarray) -> np.ndarray:
        vec = np.empty(self.alphabet.full_size)
        for i, a in enumerate(self.alphabet.symbols):
            vec[i] = float((alpha @ self.model.trans[a]).sum())
        vec[-1] = float(alpha @ self.model.term)
        return vec


def sfssm_as_asm(m: Sfssm) -> SfssmAsm:
    return SfssmAsm(m)
