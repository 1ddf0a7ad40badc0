"""Termination analysis for autoregressive sequence models.

A sequence model that picks each next symbol conditionally can leak
probability mass onto never-ending runs; this package decides when that
happens.  Stochastic finite-state models get an exact answer (graph
reachability plus one small linear solve); general models get hazard
series, analytic certificates, and seeded Monte Carlo estimates.
"""

from .core import (Alphabet, Asm, FunctionAsm, NotADistribution, OutOfRange, Str,
                   UnknownSymbol, prefix_probability, string_probability,
                   validate_conditional)
from .linalg import (Singular, SpectralEstimate, neumann_partial_sum, solve_linear,
                     spectral_radius_estimate)
from .verdicts import Certificate, TightnessVerdict
from .sfssm import (BadInit, BadRow, EmptyCorpus, NegativeEntry, NoUsefulStates, Sfssm,
                    SubstochasticFssm, accessible, build_sfssm, check_spectral_radius,
                    coaccessible, decide_tight, mle_ngram, prefix_probability_fsa,
                    string_probability_fsa, termination_probability, trim,
                    useful_states)
from .asm_zoo import (DeadPrefix, ParityAsm, RnnAsm, SfssmAsm, make_nontight_relu_rnn,
                      make_parity_asm, make_tight_softplus_rnn, rnn_conditional,
                      rnn_step, sfssm_as_asm, softmax)
from .tightness import (BoundViolated, BudgetExceeded, DualityReport, EmptyEvidence,
                        EosBoundFamily, EosHazardSeries, SupportExhausted,
                        TerminationEstimate, certify_nontight_upper_bound,
                        certify_tight_lower_bound, eos_hazard_enumerate,
                        eos_hazard_fsa, fit_geometric_tail, monte_carlo_termination,
                        product_sum_duality_check, rnn_log_norm_test, suggests_tight,
                        termination_cdf)
from .modelfile import (BUILTINS, ParseError, as_asm, load_model, model_digest,
                        parse_corpus, parse_model, write_model)

__version__ = "0.1.0"
