"""Exact binary-signal algebra, asynchronous system models and causality checks."""

from .errors import *  # noqa: F401,F403
from .signal import (BinarySignal, BinaryWord, Domain, Restriction, TimeGrid, as_time, chi,
                     chi_before, concat, constant, coordinate, derivative_support, first_switch,
                     format_time, grid_signals, is_in_S0, left_limit, parity_integral, phi,
                     pointwise, restrict, sample_points, splice, stack, translate, value_at,
                     window_join, window_meet, word)
from .systems import (BoundedDelayClosed, BoundedDelayWindow, Check, ConstState, IdealCombinational,
                      InertialDelay, MonotoneCover, ParityLower, PhiWindow, PureDelay, Restricted,
                      SystemModel, Tabulated, TruthTable, adequate_grid, brute_force_states,
                      enumerate_states, eval_deterministic, eval_inertial, membership,
                      subsystem_check, time_invariance_check)
from .checkers import (NaProperty, SearchBounds, Verdict, check_all, check_condition, check_def31, check_def51,
                       check_lemma35, check_star, implication_audit, replay_witness,
                       representative_times)
from .constructions import (FundamentalModeSpec, NormalizedSystem, TransferSpec, compose_transfer,
                            delay_oracle, extend_by_translation, format_trace, next_state_trace,
                            restrict_to_zero, synthesize_fundamental_mode, verify_fundamental_mode)
from .dsl import (format_corpus, format_system, load_corpus, load_system, parse_corpus, parse_grid,
                  parse_signal, parse_system, parse_systems)

__version__ = "0.1.0"
