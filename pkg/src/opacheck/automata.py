"""Finite-automaton model for partially observed systems.

States are indexed; state sets are bitmasks (arbitrary-width ints), which is
both the canonical deduplication key for estimates and the representation the
search kernels operate on. Everything here is a pure function of immutable
inputs; results are safe to share across threads.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Iterator, Sequence

from . import _kernel
from .errors import StateSpaceLimitError

DEFAULT_CAP = 1 << 22

#: Step bound meaning "unbounded": use with verify_kso for infinite-step checks.
INF = math.inf

_STEP_BOUND_RE = re.compile(r"0|[1-9][0-9]*|inf")


def is_step_bound(k) -> bool:
    """True for a non-negative int or INF (bools excluded)."""
    if k == INF:
        return True
    return isinstance(k, int) and not isinstance(k, bool) and k >= 0


def parse_step_bound(text: str):
    """Parse a step bound: decimal digits (no leading zeros) or 'inf'."""
    if not _STEP_BOUND_RE.fullmatch(text):
        raise ValueError(f"bad step bound {text!r}: expected decimal digits or 'inf'")
    return INF if text == "inf" else int(text)


def format_step_bound(k) -> str:
    return "inf" if k == INF else str(k)


@dataclass(frozen=True)
class Event:
    name: str
    observable: bool = True


@dataclass(frozen=True)
class Automaton:
    """Nondeterministic finite automaton over an event alphabet.

    ``transitions`` is a relation of (source, event, target) index triples;
    ``initial`` and ``marked`` are state-index sets.
    """

    states: tuple[str, ...]
    events: tuple[Event, ...]
    transitions: frozenset[tuple[int, int, int]]
    initial: frozenset[int]
    marked: frozenset[int] = frozenset()

    @property
    def n(self) -> int:
        return len(self.states)

    def state_index(self, name: str) -> int:
        return _state_index(self)[name]

    def event_index(self, name: str) -> int:
        return _event_index(self)[name]


@dataclass(frozen=True)
class DES:
    """An automaton with secret / non-secret state labels.

    States in neither set are neutral, which is permitted on input. The
    observable/unobservable split lives on the automaton's events.
    """

    automaton: Automaton
    secret: frozenset[int]
    nonsecret: frozenset[int]
    name: str = "des"

    @property
    def n(self) -> int:
        return self.automaton.n


@lru_cache(maxsize=512)
def _state_index(a: Automaton) -> dict:
    return {s: i for i, s in enumerate(a.states)}


@lru_cache(maxsize=512)
def _event_index(a: Automaton) -> dict:
    return {e.name: i for i, e in enumerate(a.events)}


def build_automaton(
    states: Iterable[str],
    events: Iterable[str],
    trans: Iterable[tuple[str, str, str]],
    initial: Iterable[str],
    marked: Iterable[str] = (),
    unobservable: Iterable[str] = (),
) -> Automaton:
    """Name-based constructor; raises ValueError on undeclared names."""
    states = tuple(states)
    uo = set(unobservable)
    evs = tuple(Event(e, e not in uo) for e in events)
    sidx = {s: i for i, s in enumerate(states)}
    eidx = {e.name: i for i, e in enumerate(evs)}
    missing = uo - set(eidx)
    if missing:
        raise ValueError(f"unobservable events not declared: {sorted(missing)}")

    def s(name, what="state"):
        try:
            return sidx[name]
        except KeyError:
            raise ValueError(f"undeclared {what}: {name!r}") from None

    t = set()
    for p, a, q in trans:
        if a not in eidx:
            raise ValueError(f"undeclared event: {a!r}")
        t.add((s(p), eidx[a], s(q)))
    return Automaton(
        states,
        evs,
        frozenset(t),
        frozenset(s(x, "initial state") for x in initial),
        frozenset(s(x, "marked state") for x in marked),
    )


def build_des(
    states: Iterable[str],
    events: Iterable[str],
    trans: Iterable[tuple[str, str, str]],
    initial: Iterable[str],
    secret: Iterable[str] = (),
    nonsecret: Iterable[str] = (),
    marked: Iterable[str] = (),
    unobservable: Iterable[str] = (),
    name: str = "des",
) -> DES:
    a = build_automaton(states, events, trans, initial, marked, unobservable)
    sidx = _state_index(a)
    try:
        sec = frozenset(sidx[x] for x in secret)
        ns = frozenset(sidx[x] for x in nonsecret)
    except KeyError as e:
        raise ValueError(f"undeclared labeled state: {e.args[0]!r}") from None
    return DES(a, sec, ns, name)


def _is_token(tok: str) -> bool:
    return bool(tok) and "#" not in tok and not any(c.isspace() for c in tok)


def validate(d: DES) -> list[str]:
    """Structural diagnostics; empty list means the system is well formed."""
    out = []
    a = d.automaton
    n = a.n
    seen = set()
    for s in a.states:
        if not _is_token(s):
            out.append(f"bad state token: {s!r}")
        if s in seen:
            out.append(f"duplicate state name: {s!r}")
        seen.add(s)
    seen = set()
    for e in a.events:
        if not _is_token(e.name):
            out.append(f"bad event token: {e.name!r}")
        if e.name in seen:
            out.append(f"duplicate event name: {e.name!r}")
        seen.add(e.name)
    for (p, ev, q) in sorted(a.transitions):
        if not 0 <= p < n or not 0 <= q < n:
            out.append(f"unknown state in transition ({p},{ev},{q})")
        if not 0 <= ev < len(a.events):
            out.append(f"unknown event in transition ({p},{ev},{q})")
    for label, group in (("initial", a.initial), ("marked", a.marked),
                         ("secret", d.secret), ("nonsecret", d.nonsecret)):
        for q in sorted(group):
            if not 0 <= q < n:
                out.append(f"unknown state in {label} set: {q}")
    for q in sorted(d.secret & d.nonsecret):
        nm = a.states[q] if 0 <= q < n else str(q)
        out.append(f"secret/nonsecret overlap: {nm}")
    return out


# ---------------------------------------------------------------------------
# Bitmask helpers


def mask_bits(mask: int) -> Iterator[int]:
    """Indices of the set bits, ascending."""
    while mask:
        b = mask & -mask
        yield b.bit_length() - 1
        mask ^= b


def to_mask(d: DES | Automaton, names: Iterable[str]) -> int:
    a = d.automaton if isinstance(d, DES) else d
    idx = _state_index(a)
    m = 0
    for nm in names:
        m |= 1 << idx[nm]
    return m


def to_names(d: DES | Automaton, mask: int) -> tuple[str, ...]:
    a = d.automaton if isinstance(d, DES) else d
    return tuple(a.states[i] for i in mask_bits(mask))


def set_mask(indices: Iterable[int]) -> int:
    m = 0
    for i in indices:
        m |= 1 << i
    return m


# ---------------------------------------------------------------------------
# Observation tables: one-step relation, unobservable closure, and the
# closure-folded observable step used by the observer and every search.


@dataclass(frozen=True)
class ObsTables:
    n: int
    obs_events: tuple[int, ...]  # global indices of observable events, declaration order
    gamma: tuple[tuple[int, ...], ...]  # [obs position][state] -> successor mask
    raw: tuple[tuple[int, ...], ...]  # [global event][state] -> one-step successor mask
    closure: tuple[int, ...]  # [state] -> unobservable closure mask (reflexive)
    init_mask: int  # closure of the initial set

    def close(self, mask: int) -> int:
        acc = 0
        for q in mask_bits(mask):
            acc |= self.closure[q]
        return acc

    def gamma_lists(self) -> list[list[int]]:
        return [list(row) for row in self.gamma]


@lru_cache(maxsize=128)
def tables(d: DES) -> ObsTables:
    a = d.automaton
    n = a.n
    ne = len(a.events)
    raw = [[0] * n for _ in range(ne)]
    for (p, e, q) in a.transitions:
        raw[e][p] |= 1 << q

    uo_step = [0] * n
    for e, ev in enumerate(a.events):
        if not ev.observable:
            for q in range(n):
                uo_step[q] |= raw[e][q]

    closure = [(1 << q) for q in range(n)]
    changed = True
    while changed:
        changed = False
        for q in range(n):
            cur = closure[q]
            new = cur
            for r in mask_bits(cur):
                new |= uo_step[r] | closure[r]
            if new != cur:
                closure[q] = new
                changed = True

    def close(mask):
        acc = 0
        for q in mask_bits(mask):
            acc |= closure[q]
        return acc

    obs = [i for i, ev in enumerate(a.events) if ev.observable]
    gamma = []
    for e in obs:
        row = []
        step = raw[e]
        for q in range(n):
            img = 0
            for p in mask_bits(closure[q]):
                img |= step[p]
            row.append(close(img))
        gamma.append(tuple(row))

    return ObsTables(
        n=n,
        obs_events=tuple(obs),
        gamma=tuple(gamma),
        raw=tuple(tuple(r) for r in raw),
        closure=tuple(closure),
        init_mask=close(set_mask(a.initial)),
    )


def unobservable_closure(d: DES, mask: int) -> int:
    """States reachable from ``mask`` by unobservable events alone (reflexive)."""
    return tables(d).close(mask)


def project_string(d: DES, word: Sequence[str]) -> tuple[str, ...]:
    """Erase unobservable events from a word; the intruder's view of it."""
    a = d.automaton
    keep = {e.name for e in a.events if e.observable}
    return tuple(x for x in word if x in keep)


def project(d: DES) -> Automaton:
    """The projected automaton: same states, observable alphabet, transitions
    folded through unobservable closure before and after each observable step.
    Initial states are the closure of the original initial set."""
    t = tables(d)
    a = d.automaton
    evs = tuple(a.events[i] for i in t.obs_events)
    trans = set()
    for pos in range(len(t.obs_events)):
        row = t.gamma[pos]
        for q in range(t.n):
            for q2 in mask_bits(row[q]):
                trans.add((q, pos, q2))
    return Automaton(a.states, evs, frozenset(trans), frozenset(mask_bits(t.init_mask)), a.marked)


def observer_step(d: DES, z: int, event: int | str) -> int:
    """Successor estimate of ``z`` under one observable event.

    Deterministic in (z, event); the empty estimate is absorbing.
    """
    t = tables(d)
    a = d.automaton
    e = a.event_index(event) if isinstance(event, str) else event
    if not a.events[e].observable:
        raise ValueError(f"event {a.events[e].name!r} is not observable")
    pos = t.obs_events.index(e)
    row = t.gamma[pos]
    acc = 0
    for q in mask_bits(z):
        acc |= row[q]
    return acc


@dataclass(frozen=True)
class ObserverGraph:
    """Reachable estimates of a system, with a total transition table.

    ``masks[0]`` is the initial estimate; ``trans[i][p]`` is the index of the
    successor of estimate i under the p-th observable event. The empty
    estimate appears iff some estimate actually dies.
    """

    masks: tuple[int, ...]
    trans: tuple[tuple[int, ...], ...]
    obs_events: tuple[int, ...]

    def index(self) -> dict:
        return {m: i for i, m in enumerate(self.masks)}


def observer_reach(d: DES, cap: int = DEFAULT_CAP, backend: str | None = None) -> ObserverGraph:
    """Breadth-first enumeration of all reachable estimates.

    Raises StateSpaceLimitError beyond ``cap`` estimates.
    """
    t = tables(d)
    kern = _kernel.get_kernel(backend)
    masks, trans = kern.observer_reach(t.n, t.gamma_lists(), t.init_mask, cap)
    return ObserverGraph(tuple(masks), tuple(tuple(r) for r in trans), t.obs_events)


@dataclass(frozen=True)
class ProductNode:
    left: int  # state of the projected automaton
    right: int  # estimate mask


@dataclass(frozen=True)
class ProductAutomaton:
    """Product of the projected automaton with the observer, materialized.

    Right components are expanded on demand, so estimates that are not
    reachable from the initial estimate still get their successors.
    ``transitions`` holds (node, observable event position, node) triples.
    """

    nodes: tuple[ProductNode, ...]
    initial: tuple[int, ...]
    transitions: tuple[tuple[int, int, int], ...]
    obs_events: tuple[int, ...]

    def index(self) -> dict:
        return {(nd.left, nd.right): i for i, nd in enumerate(self.nodes)}


def product_with_observer(
    d: DES, initials: Iterable[tuple[int, int]], cap: int = DEFAULT_CAP
) -> ProductAutomaton:
    """Materialize the reachable part of the product from the given
    (state, estimate-mask) pairs. A pair moves under an observable event iff
    its left component can; the right component always advances, possibly to
    the empty estimate."""
    t = tables(d)
    ne = len(t.obs_events)
    zsucc: dict[int, list[int]] = {}

    def zrow(zm: int) -> list[int]:
        row = zsucc.get(zm)
        if row is None:
            row = []
            for pos in range(ne):
                g = t.gamma[pos]
                acc = 0
                for q in mask_bits(zm):
                    acc |= g[q]
                row.append(acc)
            zsucc[zm] = row
        return row

    index: dict[tuple[int, int], int] = {}
    nodes: list[ProductNode] = []
    init_ids = []
    for (q, zm) in initials:
        key = (q, zm)
        if key not in index:
            index[key] = len(nodes)
            nodes.append(ProductNode(q, zm))
            init_ids.append(index[key])
    queue = list(range(len(nodes)))
    trans = []
    pos_q = 0
    while pos_q < len(queue):
        i = queue[pos_q]
        pos_q += 1
        nd = nodes[i]
        row = zrow(nd.right)
        for pos in range(ne):
            lefts = t.gamma[pos][nd.left]
            if not lefts:
                continue
            z2 = row[pos]
            for q2 in mask_bits(lefts):
                key = (q2, z2)
                j = index.get(key)
                if j is None:
                    j = len(nodes)
                    if j >= cap:
                        raise StateSpaceLimitError(
                            f"product exceeds cap of {cap} states; raise the cap if intended"
                        )
                    index[key] = j
                    nodes.append(ProductNode(q2, z2))
                    queue.append(j)
                trans.append((i, pos, j))
    return ProductAutomaton(tuple(nodes), tuple(init_ids), tuple(trans), t.obs_events)


def sync_product(a: Automaton, b: Automaton, cap: int = DEFAULT_CAP) -> Automaton:
    """Synchronous product: shared events move both components, private events
    move one. A pair is initial iff both parts are, marked iff both are.
    Shared event names must agree on observability."""
    ea = {e.name: i for i, e in enumerate(a.events)}
    eb = {e.name: i for i, e in enumerate(b.events)}
    for e in a.events:
        if e.name in eb and b.events[eb[e.name]].observable != e.observable:
            raise ValueError(f"shared event {e.name!r} disagrees on observability")
    events = list(a.events) + [e for e in b.events if e.name not in ea]

    # per-side successor lists
    succ_a: dict[tuple[int, int], list[int]] = {}
    for (p, e, q) in a.transitions:
        succ_a.setdefault((p, e), []).append(q)
    succ_b: dict[tuple[int, int], list[int]] = {}
    for (p, e, q) in b.transitions:
        succ_b.setdefault((p, e), []).append(q)

    index: dict[tuple[int, int], int] = {}
    pairs: list[tuple[int, int]] = []

    def intern(pa: int, pb: int) -> int:
        key = (pa, pb)
        i = index.get(key)
        if i is None:
            i = len(pairs)
            if i >= cap:
                raise StateSpaceLimitError(f"synchronous product exceeds cap of {cap} states")
            index[key] = i
            pairs.append(key)
        return i

    for pa in sorted(a.initial):
        for pb in sorted(b.initial):
            intern(pa, pb)
    trans = set()
    pos = 0
    while pos < len(pairs):
        i = pos
        pa, pb = pairs[pos]
        pos += 1
        for gi, ev in enumerate(events):
            ia = ea.get(ev.name)
            ib = eb.get(ev.name)
            if ia is not None and ib is not None:
                for qa in succ_a.get((pa, ia), ()):
                    for qb in succ_b.get((pb, ib), ()):
                        trans.add((i, gi, intern(qa, qb)))
            elif ia is not None:
                for qa in succ_a.get((pa, ia), ()):
                    trans.add((i, gi, intern(qa, pb)))
            else:
                for qb in succ_b.get((pb, ib), ()):
                    trans.add((i, gi, intern(pa, qb)))
    # interning appends while iterating; recompute names/marks afterwards
    names = tuple(f"({a.states[pa]},{b.states[pb]})" for (pa, pb) in pairs)
    initial = frozenset(
        index[(pa, pb)] for pa in a.initial for pb in b.initial if (pa, pb) in index
    )
    marked = frozenset(
        i for i, (pa, pb) in enumerate(pairs) if pa in a.marked and pb in b.marked
    )
    return Automaton(names, tuple(events), frozenset(trans), initial, marked)


def reachable_part(a: Automaton) -> Automaton:
    """Restriction of an automaton to the states reachable from its initial
    set; marks are preserved on the surviving states."""
    succ: dict[int, list[int]] = {}
    for (p, e, q) in a.transitions:
        succ.setdefault(p, []).append(q)
    seen = set(a.initial)
    stack = sorted(a.initial)
    while stack:
        p = stack.pop()
        for q in succ.get(p, ()):
            if q not in seen:
                seen.add(q)
                stack.append(q)
    keep = [i for i in range(a.n) if i in seen]
    remap = {old: new for new, old in enumerate(keep)}
    return Automaton(
        tuple(a.states[i] for i in keep),
        a.events,
        frozenset((remap[p], e, remap[q]) for (p, e, q) in a.transitions if p in seen and q in seen),
        frozenset(remap[i] for i in a.initial),
        frozenset(remap[i] for i in a.marked if i in seen),
    )
