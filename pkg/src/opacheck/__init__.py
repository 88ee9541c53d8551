"""Opacity checking for finite-automaton models with partial observation.

Decides current-state, K-step, and infinite-step opacity, extracts
observation-level witnesses, rewrites between the notions, and builds the
logarithmic-size step-counter automata the rewrites rely on.
"""

from ._kernel import available_backends, backend_name
from .automata import (
    DEFAULT_CAP,
    DES,
    INF,
    Automaton,
    Event,
    ObserverGraph,
    ProductAutomaton,
    build_automaton,
    build_des,
    format_step_bound,
    is_step_bound,
    mask_bits,
    observer_reach,
    observer_step,
    parse_step_bound,
    product_with_observer,
    project,
    project_string,
    reachable_part,
    set_mask,
    sync_product,
    to_mask,
    to_names,
    unobservable_closure,
    validate,
)
from .bench import BenchRow, bench_des, rows_to_csv
from .counter import CounterAutomaton, block_nfa, block_word, build_counter, counter_word, decompose
from .desfile import parse, same_structure, serialize
from .errors import (
    DesParseError,
    InconclusiveBoundError,
    NameCollisionError,
    OpacheckError,
    StateSpaceLimitError,
    TransformPreconditionError,
    ValidationError,
)
from .oracle import OracleConfig, oracle_cso, oracle_kso, oracle_kso_strings, sufficient_max_len
from .randgen import RandomSpec, gen_random
from .transforms import (
    EquivalenceClaim,
    TransformResult,
    cso_to_kso,
    cso_to_kso_single_event,
    cso_to_kso_two_events,
    determinize_preserving,
    encode_events,
    inso_to_cso,
    kso_to_cso,
    kso_to_cso_neutral,
    kso_to_cso_single_event,
    lift_alphabet,
)
from .verify import (
    SearchStats,
    Verdict,
    Witness,
    initial_pairs,
    verify_cso,
    verify_inso,
    verify_kso,
    verify_kso_detailed,
)

__version__ = "0.1.0"
