"""Step-counter automata of size polynomial in the bit-length of the bound.

A block NFA over {a1..an} accepts every string except the prefixes of one
canonical word; chaining blocks with a tick event yields a counter whose
observer contains a unique path of exactly k non-marked estimates, every
other estimate containing a marked state. That path is what bounds the
number of observable steps in the bound-to-zero-step reductions.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import comb

from .automata import Automaton, Event


@lru_cache(maxsize=None)
def block_word(k: int, n: int) -> tuple[str, ...]:
    """The canonical word over a1..an: empty when k*n == 0, a1^k for one
    event, otherwise word(k, n-1) + an + word(k-1, n). Its length is
    C(k+n, k) - 1 and the last event occurs exactly k times."""
    if k < 0 or n < 0:
        raise ValueError("negative parameters")
    if k == 0 or n == 0:
        return ()
    if n == 1:
        return ("a1",) * k
    return block_word(k, n - 1) + (f"a{n}",) + block_word(k - 1, n)


def block_nfa(k: int, n: int) -> Automaton:
    """NFA with n(k+2) states accepting exactly the strings that are not
    prefixes of block_word(k, n).

    States are named (i;m) with row i in 0..k+1 and column m in 1..n; every
    (0;m) is initial and every (k+1;m) is marked. (k+1;n) is the maximal
    state.
    """
    if k < 0 or n < 1:
        raise ValueError("need k >= 0 and n >= 1")
    rows = k + 2
    states = [f"({i};{m})" for m in range(1, n + 1) for i in range(rows)]
    events = [f"a{j}" for j in range(1, n + 1)]
    trans: set[tuple[str, str, str]] = set()

    def st(i, m):
        return f"({i};{m})"

    # column 1: a1-chain with a self-loop at the top
    for i in range(k + 1):
        trans.add((st(i, 1), "a1", st(i + 1, 1)))
    trans.add((st(k + 1, 1), "a1", st(k + 1, 1)))

    for c in range(2, n + 1):
        ac = f"a{c}"
        for i in range(rows):
            for j in range(1, c):
                trans.add((st(i, c), f"a{j}", st(i, c)))  # lower events idle
        for i in range(k + 1):
            trans.add((st(i, c), ac, st(i + 1, c)))
        trans.add((st(k + 1, c), ac, st(k + 1, c)))
        for i in range(k + 1):
            for m in range(1, c):
                trans.add((st(i, c), ac, st(i + 1, m)))
        # off-count rows of the smaller automaton jump to the new maximal
        for m in range(1, c):
            for i in range(rows):
                if i != k:
                    trans.add((st(i, m), ac, st(k + 1, c)))

    sidx = {s: i for i, s in enumerate(states)}
    eidx = {e: i for i, e in enumerate(events)}
    return Automaton(
        states=tuple(states),
        events=tuple(Event(e) for e in events),
        transitions=frozenset((sidx[p], eidx[a], sidx[q]) for (p, a, q) in trans),
        initial=frozenset(sidx[st(0, m)] for m in range(1, n + 1)),
        marked=frozenset(sidx[st(k + 1, m)] for m in range(1, n + 1)),
    )


def _max_representable(top: int) -> int:
    # largest value expressible with digits <= 3 over central binomials up to index top
    return 3 * sum(comb(2 * i, i) for i in range(top + 1))


def decompose(k: int) -> list[tuple[int, int]]:
    """Greedy digits of k over the central-binomial base C(2i, i), each digit
    in {0,1,2,3}; returns (index, digit) pairs, nonzero digits only,
    descending index. The top index is the least that can reach k at all."""
    if not isinstance(k, int) or k < 0:
        raise ValueError("k must be a non-negative int")
    if k == 0:
        return []
    top = 0
    while _max_representable(top) < k:
        top += 1
    out = []
    rem = k
    for i in range(top, -1, -1):
        c = comb(2 * i, i)
        b = min(3, rem // c)
        if b:
            out.append((i, b))
            rem -= b * c
    assert rem == 0, (k, out)
    return out


@dataclass(frozen=True)
class CounterAutomaton:
    """Assembled counter: a fresh start state ticks into the first block;
    each block's in-count states tick into the next; every stray move lands
    on the marked maximal sink, which loops on the whole alphabet."""

    automaton: Automaton
    initial: str
    maximal: str
    blocks: tuple[tuple[str, ...], ...]  # state names per block, assembly order
    word: tuple[str, ...]  # the unique all-non-marked observation, length k


def counter_word(k: int) -> tuple[str, ...]:
    """The only length-k observation the counter's observer never marks:
    per block copy, a tick then that block's word."""
    out: list[str] = []
    for i, b in decompose(k):
        piece = ("c",) + block_word(i, max(i, 1))
        out.extend(piece * b)
    assert len(out) == k
    return tuple(out)


def build_counter(k: int) -> CounterAutomaton:
    """Counter automaton for bound k; state count is polynomial in the
    bit-length of k."""
    digits = decompose(k)
    specs: list[int] = []  # block column counts; a unit digit is a one-column block
    for i, b in digits:
        specs.extend([i] * b)

    if not specs:
        # bound zero: start plus the marked sink, tick only
        states = ("q0", "qmax")
        events = (Event("c"),)
        trans = frozenset({(0, 0, 1), (1, 0, 1)})
        aut = Automaton(states, events, trans, frozenset({0}), frozenset({1}))
        return CounterAutomaton(aut, "q0", "qmax", (), ())

    ncols = max(max(i, 1) for i in specs)
    events = [f"a{j}" for j in range(1, ncols + 1)] + ["c"]

    block_states: list[list[str]] = []
    block_inits: list[list[str]] = []
    block_marked: list[set[str]] = []
    block_alpha: list[set[str]] = []
    names: list[str] = ["q0"]
    trans: set[tuple[str, str, str]] = set()
    marked: set[str] = set()

    for j, i in enumerate(specs, start=1):
        blk = block_nfa(i, max(i, 1))
        suffix = "" if j == 1 else f"_{j}"
        local = [s + suffix for s in blk.states]
        names.extend(local)
        block_states.append(local)
        block_inits.append([blk.states[s] + suffix for s in sorted(blk.initial)])
        bm = {blk.states[s] + suffix for s in sorted(blk.marked)}
        block_marked.append(bm)
        marked |= bm
        block_alpha.append({e.name for e in blk.events})
        for (p, e, q) in blk.transitions:
            trans.add((blk.states[p] + suffix, blk.events[e].name, blk.states[q] + suffix))

    last = len(specs) - 1
    top_i = max(specs[last], 1)
    maximal = f"({specs[last] + 1};{top_i})" + ("" if last == 0 else f"_{last + 1}")

    # ticks: start into the first block; in-count states forward; strays sink
    for s in block_inits[0]:
        trans.add(("q0", "c", s))
    for e in events:
        if e != "c":
            trans.add(("q0", e, maximal))
    for j, local in enumerate(block_states):
        for s in local:
            if j < last and s not in block_marked[j]:
                for nxt in block_inits[j + 1]:
                    trans.add((s, "c", nxt))
            else:
                trans.add((s, "c", maximal))
            for e in events:
                if e != "c" and e not in block_alpha[j]:
                    trans.add((s, e, maximal))

    sidx = {s: i for i, s in enumerate(names)}
    eidx = {e: i for i, e in enumerate(events)}
    aut = Automaton(
        states=tuple(names),
        events=tuple(Event(e) for e in events),
        transitions=frozenset((sidx[p], eidx[a], sidx[q]) for (p, a, q) in trans),
        initial=frozenset({0}),
        marked=frozenset(sidx[s] for s in sorted(marked)),
    )
    return CounterAutomaton(
        aut,
        "q0",
        maximal,
        tuple(tuple(b) for b in block_states),
        counter_word(k),
    )
