"""Finite-state engine: validation, probabilities, reachability, trimming,
exact tightness decisions, and n-gram estimation."""

import numpy as np
import pytest

from seqtight import (Alphabet, BadInit, BadRow, EmptyCorpus, NegativeEntry,
                      NoUsefulStates, accessible, build_sfssm, check_spectral_radius,
                      coaccessible, decide_tight, mle_ngram, neumann_partial_sum,
                      prefix_probability_fsa, string_probability_fsa,
                      termination_probability, trim, useful_states)

from conftest import random_corpus, random_sfssm, strings_up_to


def one_state_stopper():
    return build_sfssm(Alphabet(("a",)), {"a": np.zeros((1, 1))}, [1.0], [1.0])


def all_zero_term_model():
    return build_sfssm(Alphabet(("a",)), {"a": np.ones((1, 1))}, [1.0], [0.0])


# -- construction ----------------------------------------------------------

def test_build_accepts_bigram_table(fig1a):
    assert fig1a.num_states == 3
    assert fig1a.names == ("BOS", "a", "b")
    np.testing.assert_array_equal(fig1a.init, [1, 0, 0])


def test_build_rejects_bad_row():
    alphabet = Alphabet(("a", "b"))
    trans = {
        "a": np.array([[0, 1, 0], [0, 0.7, 0], [0, 0, 0]], dtype=float),
        "b": np.array([[0, 0, 0], [0, 0, 0.2], [0, 0, 1.0]], dtype=float),
    }
    with pytest.raises(BadRow) as info:
        build_sfssm(alphabet, trans, [1, 0, 0], [0, 0.2, 0], names=("BOS", "a", "b"))
    assert info.value.name == "a"
    assert info.value.total == pytest.approx(1.1)


def test_build_rejects_bad_init():
    with pytest.raises(BadInit):
        build_sfssm(Alphabet(("a",)), {"a": np.zeros((1, 1))}, [0.5], [1.0])


def test_build_rejects_negative_entries():
    with pytest.raises(NegativeEntry) as info:
        build_sfssm(Alphabet(("a",)), {"a": np.array([[-0.1]])}, [1.0], [1.1])
    assert info.value.location == ("trans", "a", 0, 0)


def test_degenerate_single_state_model_is_fine():
    model = one_state_stopper()
    assert string_probability_fsa(model, ()) == 1.0
    assert decide_tight(model).is_tight


def test_missing_transition_matrices_default_to_zero():
    model = build_sfssm(Alphabet(("a", "b")), {"a": np.array([[0.5]])}, [1.0], [0.5])
    assert string_probability_fsa(model, ("b",)) == 0.0


# -- string/prefix probabilities -------------------------------------------

def test_string_probabilities_match_hand_products(fig1a, fig1b):
    assert string_probability_fsa(fig1a, ("a",)) == pytest.approx(0.1, abs=1e-15)
    assert string_probability_fsa(fig1a, ("a", "a", "b")) == 0.0
    assert string_probability_fsa(fig1b, ("a", "b")) == pytest.approx(0.02, abs=1e-15)


def test_prefix_probabilities_match_hand_products(fig1a):
    assert prefix_probability_fsa(fig1a, ()) == 1.0
    assert prefix_probability_fsa(fig1a, ("a", "a")) == pytest.approx(0.7, abs=1e-15)
    assert prefix_probability_fsa(fig1a, ("a", "b")) == pytest.approx(0.2, abs=1e-15)


# -- reachability ------------------------------------------------------------

def test_accessible_covers_whole_graph(fig1a, fig1b):
    assert accessible(fig1a) == {0, 1, 2}
    assert accessible(fig1b) == {0, 1, 2}


def test_accessible_without_edges_is_just_the_start():
    model = build_sfssm(Alphabet(("a",)),
                        {"a": np.array([[0.0, 0.0], [0.0, 0.0]])},
                        [1.0, 0.0], [1.0, 1.0])
    assert accessible(model) == {0}


def test_coaccessible_excludes_trapped_state(fig1a, fig1b):
    assert coaccessible(fig1a) == {0, 1}  # state b never reaches termination
    assert coaccessible(fig1b) == {0, 1, 2}


def test_coaccessible_empty_when_nothing_terminates():
    assert coaccessible(all_zero_term_model()) == frozenset()


# -- tightness decision -------------------------------------------------------

def test_decide_tight_flags_leaky_model(fig1a):
    verdict = decide_tight(fig1a)
    assert verdict.is_non_tight
    assert verdict.witness_name == "b"
    assert verdict.leaked_mass == pytest.approx(2.0 / 3.0, abs=1e-9)


def test_decide_tight_accepts_fixed_model(fig1b):
    assert decide_tight(fig1b).is_tight


def test_decide_tight_trivial_stopper():
    assert decide_tight(one_state_stopper()).is_tight


def test_decide_tight_initial_mass_on_dead_state():
    # mass placed on a state that cannot stop is itself the witness
    model = build_sfssm(Alphabet(("a",)),
                        {"a": np.array([[0.0, 0.0], [0.0, 1.0]])},
                        [0.5, 0.5], [1.0, 0.0])
    verdict = decide_tight(model)
    assert verdict.is_non_tight
    assert verdict.witness_state == 1
    assert verdict.leaked_mass == pytest.approx(0.5, abs=1e-12)


# -- trimming ------------------------------------------------------------------

def test_trim_drops_trapped_state(fig1a):
    sub = trim(fig1a)
    assert sub.names == ("BOS", "a")
    assert sub.state_map == (0, 1)
    np.testing.assert_array_equal(sub.init, [1.0, 0.0])
    np.testing.assert_array_equal(sub.term, [0.0, 0.1])
    np.testing.assert_array_equal(sub.trans["a"], [[0.0, 1.0], [0.0, 0.7]])


def test_trim_is_identity_on_clean_model(fig1b):
    sub = trim(fig1b)
    assert sub.state_map == (0, 1, 2)
    np.testing.assert_array_equal(sub.transition_sum, fig1b.transition_sum)


def test_trim_rejects_hopeless_model():
    with pytest.raises(NoUsefulStates):
        trim(all_zero_term_model())


@pytest.mark.parametrize("seed", range(25))
def test_trim_preserves_string_probabilities(seed):
    rng = np.random.default_rng(1000 + seed)
    model = random_sfssm(rng, max_states=6, max_symbols=3)
    sub = trim(model)
    row_mass = sub.transition_sum.sum(axis=1) + np.asarray(sub.term)
    assert (row_mass <= 1.0 + 1e-9).all()
    assert set(sub.state_map) <= set(range(model.num_states))
    for x in strings_up_to(model.alphabet.symbols, 6):
        assert string_probability_fsa(sub, x) == pytest.approx(
            string_probability_fsa(model, x), abs=1e-12)


# -- termination probability ---------------------------------------------------

def test_termination_probability_of_leaky_model(fig1a):
    assert termination_probability(trim(fig1a)) == pytest.approx(1.0 / 3.0, abs=1e-9)


def test_termination_probability_of_tight_model(fig1b):
    assert termination_probability(trim(fig1b)) == pytest.approx(1.0, abs=1e-9)


def test_termination_probability_geometric_half():
    model = build_sfssm(Alphabet(("a",)), {"a": np.array([[0.5]])}, [1.0], [0.5])
    assert termination_probability(trim(model)) == pytest.approx(1.0, abs=1e-9)


def test_spectral_radius_of_trimmed_models(fig1a, fig1b):
    assert check_spectral_radius(trim(fig1a)) == pytest.approx(0.7, abs=1e-9)
    assert check_spectral_radius(trim(fig1b)) == pytest.approx(0.9, abs=1e-9)


# -- randomized cross-checks ---------------------------------------------------

@pytest.mark.parametrize("seed", range(40))
def test_verdict_consistency_and_neumann_oracle(seed):
    rng = np.random.default_rng(2000 + seed)
    model = random_sfssm(rng)
    sub = trim(model)

    # graph decision vs exact matrix formula
    reached = termination_probability(sub)
    if decide_tight(model).is_tight:
        assert reached == pytest.approx(1.0, abs=1e-9)
    else:
        assert reached < 1.0 - 1e-9

    # finite-horizon mass vs Neumann partial sum
    horizon = 8
    brute = sum(string_probability_fsa(model, x)
                for x in strings_up_to(model.alphabet.symbols, horizon))
    neumann = float(sub.init @ neumann_partial_sum(sub.transition_sum, np.asarray(sub.term), horizon))
    assert brute == pytest.approx(neumann, abs=1e-9)

    assert check_spectral_radius(sub) < 1.0


# -- n-gram estimation ----------------------------------------------------------

def test_mle_bigram_single_string():
    model = mle_ngram([("a", "b")], 2)
    assert model.names == ("BOS", "a", "b")
    assert model.trans["a"][0, 1] == 1.0
    assert model.trans["b"][1, 2] == 1.0
    np.testing.assert_array_equal(model.term, [0.0, 0.0, 1.0])
    assert decide_tight(model).is_tight


def test_mle_bigram_empty_string_corpus():
    model = mle_ngram([()], 2)
    assert model.num_states == 1
    np.testing.assert_array_equal(model.term, [1.0])
    assert decide_tight(model).is_tight


def test_mle_bigram_event_counts():
    model = mle_ngram([("a",), ("a", "a")], 2)
    a_state = model.names.index("a")
    assert model.trans["a"][a_state, a_state] == pytest.approx(1.0 / 3.0)
    assert model.term[a_state] == pytest.approx(2.0 / 3.0)
    assert decide_tight(model).is_tight
    assert termination_probability(trim(model)) == pytest.approx(1.0, abs=1e-9)


def test_mle_unigram_collapses_to_single_state():
    model = mle_ngram([("a", "b", "a")], 1)
    assert model.num_states == 1
    assert model.trans["a"][0, 0] == pytest.approx(0.5)
    assert model.trans["b"][0, 0] == pytest.approx(0.25)
    assert model.term[0] == pytest.approx(0.25)


def test_mle_trigram_histories():
    model = mle_ngram([("a", "b"), ("a", "b")], 3)
    assert "BOS,a" in model.names
    assert decide_tight(model).is_tight


def test_mle_rejects_empty_corpus():
    with pytest.raises(EmptyCorpus):
        mle_ngram([], 2)


def test_mle_rejects_reserved_token():
    with pytest.raises(ValueError):
        mle_ngram([("EOS",)], 2)


@pytest.mark.parametrize("seed", range(30))
def test_mle_is_always_tight(seed):
    rng = np.random.default_rng(3000 + seed)
    corpus = random_corpus(rng)
    order = int(rng.integers(1, 4))
    model = mle_ngram(corpus, order)
    assert decide_tight(model).is_tight
    assert termination_probability(trim(model)) == pytest.approx(1.0, abs=1e-9)
    assert useful_states(model) == accessible(model)
