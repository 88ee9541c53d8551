"""Reductions between opacity notions.

Each transformation emits a fresh system plus a machine-readable claim of
which verdict on the input matches which verdict on the output, so the
differential suite can check every claim under both the product search and
the brute-force search. Fresh names are provenance-suffixed (q+, q-, q.s,
"(q+,(0;1))", "p.01"); a clash with existing names raises instead of
silently renaming, and callers can pass hints.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import ceil, log2

from .automata import (
    DES,
    INF,
    Automaton,
    Event,
    build_automaton,
    format_step_bound,
    is_step_bound,
    mask_bits,
    observer_step,
    set_mask,
    tables,
    validate,
)
from .counter import build_counter
from .errors import NameCollisionError, TransformPreconditionError, ValidationError


@dataclass(frozen=True)
class EquivalenceClaim:
    """Input notion/bound on the left, output notion/bound on the right."""

    source: str  # "CSO" | "K-SO" | "INSO"
    target: str
    source_k: object = None  # int | INF | "any" | None
    target_k: object = None

    def _side(self, notion, k) -> str:
        if notion == "K-SO":
            if k == "any":
                return "K-SO for every K"
            return f"{format_step_bound(k)}-step opacity"
        if notion == "CSO":
            return "current-state opacity"
        if notion == "INSO":
            return "infinite-step opacity"
        return notion

    def describe(self) -> str:
        return (
            f"input {self._side(self.source, self.source_k)}"
            f" <=> output {self._side(self.target, self.target_k)}"
        )


@dataclass(frozen=True)
class TransformResult:
    output: DES
    claim: EquivalenceClaim
    naming: dict = field(default_factory=dict)  # output state name -> provenance tuple


def _require_valid(d: DES) -> None:
    diags = validate(d)
    if diags:
        raise ValidationError(diags)


def _finish(output: DES, claim: EquivalenceClaim, naming: dict) -> TransformResult:
    diags = validate(output)
    assert not diags, f"transform produced an invalid system: {diags}"
    return TransformResult(output, claim, naming)


def _names(d: DES, idxs) -> list[str]:
    return [d.automaton.states[i] for i in sorted(idxs)]


def _check_fresh(existing, new_names, what="name"):
    taken = set(existing)
    for nm in new_names:
        if nm in taken:
            raise NameCollisionError(f"fresh {what} {nm!r} already exists; pass a rename hint")
        taken.add(nm)


def _suffixed(a: Automaton, suffix: str, initial, marked) -> Automaton:
    """Copy with renamed states; ``initial``/``marked`` in {"keep","all","none"}."""
    pick = {
        "keep": lambda s: s,
        "all": lambda s: frozenset(range(a.n)),
        "none": lambda s: frozenset(),
    }
    return Automaton(
        tuple(s + suffix for s in a.states),
        a.events,
        a.transitions,
        pick[initial](a.initial),
        pick[marked](a.marked),
    )


def _union(parts) -> Automaton:
    """Disjoint union: events merged by name (observability must agree),
    state names must be globally unique; initial and marked sets are unions."""
    events: list[Event] = []
    eidx: dict[str, int] = {}
    for p in parts:
        for e in p.events:
            j = eidx.get(e.name)
            if j is None:
                eidx[e.name] = len(events)
                events.append(e)
            elif events[j].observable != e.observable:
                raise ValueError(f"event {e.name!r} disagrees on observability across parts")
    states: list[str] = []
    sidx: dict[str, int] = {}
    for p in parts:
        for s in p.states:
            if s in sidx:
                raise NameCollisionError(f"state {s!r} occurs in two parts of a union")
            sidx[s] = len(states)
            states.append(s)
    trans = set()
    initial = set()
    marked = set()
    for p in parts:
        for (x, e, y) in p.transitions:
            trans.add((sidx[p.states[x]], eidx[p.events[e].name], sidx[p.states[y]]))
        initial.update(sidx[p.states[i]] for i in p.initial)
        marked.update(sidx[p.states[i]] for i in p.marked)
    return Automaton(
        tuple(states), tuple(events), frozenset(trans), frozenset(initial), frozenset(marked)
    )


def _wire(a: Automaton, new_events, extra_trans) -> Automaton:
    """Add events and name-level transitions to an automaton."""
    events = list(a.events)
    enames = {e.name for e in events}
    for e in new_events:
        if e.name in enames:
            raise NameCollisionError(f"fresh event {e.name!r} already exists; pass a rename hint")
        events.append(e)
        enames.add(e.name)
    eidx = {e.name: i for i, e in enumerate(events)}
    sidx = {s: i for i, s in enumerate(a.states)}
    trans = set(a.transitions)
    for (p, e, q) in extra_trans:
        trans.add((sidx[p], eidx[e], sidx[q]))
    return Automaton(a.states, tuple(events), frozenset(trans), a.initial, a.marked)


# ---------------------------------------------------------------------------
# Zero-step to K-step


def cso_to_kso(
    d: DES, at_event: str = "@", secret_state: str = "q.s", nonsecret_state: str = "q.ns"
) -> TransformResult:
    """Two fresh states soak up a fresh observable event from the secret and
    non-secret states; the input is zero-step opaque iff the result is K-step
    opaque for every bound."""
    _require_valid(d)
    a = d.automaton
    _check_fresh(a.states, [secret_state, nonsecret_state], "state")
    _check_fresh((e.name for e in a.events), [at_event], "event")
    states = a.states + (secret_state, nonsecret_state)
    base = Automaton(states, a.events, a.transitions, a.initial, a.marked)
    wiring = [(a.states[q], at_event, secret_state) for q in sorted(d.secret)]
    wiring += [(a.states[q], at_event, nonsecret_state) for q in sorted(d.nonsecret)]
    out_aut = _wire(base, [Event(at_event, True)], wiring)
    sidx = {s: i for i, s in enumerate(states)}
    out = DES(
        out_aut,
        secret=frozenset({sidx[secret_state]}),
        nonsecret=frozenset(
            {sidx[nonsecret_state]} | set(d.secret) | set(d.nonsecret)
        ),
        name=d.name + ".kso",
    )
    naming = {s: ("orig", s) for s in a.states}
    naming[secret_state] = ("fresh", "secret-sink")
    naming[nonsecret_state] = ("fresh", "nonsecret-sink")
    claim = EquivalenceClaim("CSO", "K-SO", source_k=0, target_k="any")
    return _finish(out, claim, naming)


def _single_event_pre(d: DES) -> Event:
    a = d.automaton
    obs = [e for e in a.events if e.observable]
    if len(obs) != 1:
        raise TransformPreconditionError(
            f"exactly one observable event required, found {len(obs)}"
        )
    if d.nonsecret != frozenset(range(a.n)) - d.secret:
        raise TransformPreconditionError(
            "neutral states are not allowed here: nonsecret must be the complement of secret"
        )
    return obs[0]


def _reachable_states(a: Automaton) -> set[int]:
    succ: dict[int, list[int]] = {}
    for (p, e, q) in a.transitions:
        succ.setdefault(p, []).append(q)
    seen = set(a.initial)
    stack = list(a.initial)
    while stack:
        p = stack.pop()
        for q in succ.get(p, ()):
            if q not in seen:
                seen.add(q)
                stack.append(q)
    return seen


def _has_reachable_cycle(a: Automaton) -> bool:
    reach = _reachable_states(a)
    succ: dict[int, list[int]] = {}
    for (p, e, q) in a.transitions:
        if p in reach:
            succ.setdefault(p, []).append(q)
    color = {}  # 1 in progress, 2 done
    for root in reach:
        if color.get(root):
            continue
        stack = [(root, iter(succ.get(root, ())))]
        color[root] = 1
        while stack:
            node, it = stack[-1]
            adv = False
            for q in it:
                c = color.get(q)
                if c == 1:
                    return True
                if c is None:
                    color[q] = 1
                    stack.append((q, iter(succ.get(q, ()))))
                    adv = True
                    break
            if not adv:
                color[node] = 2
                stack.pop()
    return False


def _longest_obs_path_from_initials(d: DES) -> int:
    """Max observable-edge count over paths from the initial states; the
    transition graph must be acyclic on its reachable part."""
    a = d.automaton
    obs = {i for i, e in enumerate(a.events) if e.observable}
    succ: dict[int, list[tuple[int, int]]] = {}
    for (p, e, q) in a.transitions:
        succ.setdefault(p, []).append((e, q))
    memo: dict[int, int] = {}

    def f(q):
        if q in memo:
            return memo[q]
        memo[q] = 0  # acyclic: safe placeholder
        best = 0
        for (e, r) in succ.get(q, ()):
            best = max(best, (1 if e in obs else 0) + f(r))
        memo[q] = best
        return best

    vals = [f(q) for q in sorted(a.initial)]
    return max(vals, default=0)


def cso_to_kso_single_event(
    d: DES, star_suffix: str = "*", u_event: str = "u*"
) -> TransformResult:
    """Single-observable-event variant: three fresh states and one fresh
    unobservable event; when the generated language is finite, the maximal
    observation length pins extra transitions into a self-looping sink."""
    _require_valid(d)
    aev = _single_event_pre(d)
    a = d.automaton
    q0, q1, q2 = (f"q{i}{star_suffix}" for i in range(3))
    _check_fresh(a.states, [q0, q1, q2], "state")
    _check_fresh((e.name for e in a.events), [u_event], "event")

    states = a.states + (q0, q1, q2)
    base = Automaton(states, a.events, a.transitions, a.initial, a.marked)
    wiring = [(a.states[q], u_event, q1) for q in sorted(d.nonsecret)]
    out_aut = _wire(base, [Event(u_event, False)], wiring)
    more = [(q1, aev.name, q2), (q0, aev.name, q0), (q2, aev.name, q2)]
    finite = not _has_reachable_cycle(a)
    if finite:
        m = _longest_obs_path_from_initials(d)
        est = tables(d).init_mask
        for _ in range(m):
            est = observer_step(d, est, aev.name)
        more += [(a.states[q], aev.name, q0) for q in mask_bits(est)]
    out_aut = _wire(out_aut, [], more)

    sidx = {s: i for i, s in enumerate(states)}
    out = DES(
        out_aut,
        secret=frozenset(set(d.secret) | {sidx[q2]}),
        nonsecret=frozenset(set(d.nonsecret) | {sidx[q0], sidx[q1]}),
        name=d.name + ".kso1",
    )
    naming = {s: ("orig", s) for s in a.states}
    for nm, role in ((q0, "max-sink"), (q1, "nonsecret-hop"), (q2, "secret-sink")):
        naming[nm] = ("fresh", role)
    claim = EquivalenceClaim("CSO", "K-SO", source_k=0, target_k="any")
    return _finish(out, claim, naming)


# ---------------------------------------------------------------------------
# K-step / infinite-step to zero-step


def inso_to_cso(d: DES, at_event: str = "@") -> TransformResult:
    """Two disjoint copies track the continuations after a fresh observable
    event out of secret resp. non-secret states; the input is infinite-step
    opaque iff the result is zero-step opaque."""
    _require_valid(d)
    a = d.automaton
    _check_fresh((e.name for e in a.events), [at_event], "event")
    plus = _suffixed(a, "+", initial="none", marked="none")
    minus = _suffixed(a, "-", initial="none", marked="none")
    merged = _union([a, plus, minus])
    wiring = [(a.states[q], at_event, a.states[q] + "+") for q in sorted(d.secret)]
    wiring += [(a.states[q], at_event, a.states[q] + "-") for q in sorted(d.nonsecret)]
    out_aut = _wire(merged, [Event(at_event, True)], wiring)
    sidx = {s: i for i, s in enumerate(out_aut.states)}
    out = DES(
        out_aut,
        secret=frozenset(sidx[s + "+"] for s in a.states),
        nonsecret=frozenset(sidx[s] for s in a.states)
        | frozenset(sidx[s + "-"] for s in a.states),
        name=d.name + ".cso",
    )
    naming = {s: ("orig", s) for s in a.states}
    naming.update({s + "+": ("plus", s) for s in a.states})
    naming.update({s + "-": ("minus", s) for s in a.states})
    claim = EquivalenceClaim("INSO", "CSO", source_k=INF, target_k=0)
    return _finish(out, claim, naming)


def lift_alphabet(a: Automaton, gamma, other_first: bool = False, sep: str = ",") -> Automaton:
    """Fan every observable transition out over a disjoint alphabet: event s
    becomes the pair events s,g for each g (g,s order when ``other_first``).
    Unobservable events and transitions are untouched."""
    gamma = list(gamma)
    own = {e.name for e in a.events}
    overlap = own & set(gamma)
    if overlap:
        raise TransformPreconditionError(f"alphabets overlap: {sorted(overlap)}")

    def pname(ownname, g):
        return f"{g}{sep}{ownname}" if other_first else f"{ownname}{sep}{g}"

    events: list[Event] = [e for e in a.events if not e.observable]
    for e in a.events:
        if e.observable:
            for g in gamma:
                events.append(Event(pname(e.name, g), True))
    names = [e.name for e in events]
    if len(set(names)) != len(names):
        raise NameCollisionError("pair event names collide with existing events")
    eidx = {e.name: i for i, e in enumerate(events)}
    trans = set()
    for (p, e, q) in a.transitions:
        ev = a.events[e]
        if ev.observable:
            for g in gamma:
                trans.add((p, eidx[pname(ev.name, g)], q))
        else:
            trans.add((p, eidx[ev.name], q))
    return Automaton(a.states, tuple(events), frozenset(trans), a.initial, a.marked)


def _fresh_counter(d: DES, k):
    """Counter for bound k with event names renamed clear of the input's."""
    ca = build_counter(k)
    taken = {e.name for e in d.automaton.events}
    renames = {}
    for e in ca.automaton.events:
        nm = e.name
        while nm in taken:
            nm += "'"
        renames[e.name] = nm
        taken.add(nm)
    if all(old == new for old, new in renames.items()):
        return ca, ca.automaton
    evs = tuple(Event(renames[e.name], e.observable) for e in ca.automaton.events)
    return ca, Automaton(
        ca.automaton.states, evs, ca.automaton.transitions,
        ca.automaton.initial, ca.automaton.marked,
    )


def kso_to_cso_neutral(d: DES, k, at_event: str = "@") -> TransformResult:
    """Bound-to-zero-step reduction that keeps neutral states: disjoint union
    of the input, lifted plus/minus copies, and the lifted step counter, with
    the fresh observable event fanning out of secret and non-secret states."""
    _require_valid(d)
    if k == INF:
        raise TransformPreconditionError("bound must be finite; for the unbounded notion use inso_to_cso")
    if not is_step_bound(k):
        raise ValueError(f"bad step bound: {k!r}")
    a = d.automaton
    _check_fresh((e.name for e in a.events), [at_event], "event")
    ca, counter_aut = _fresh_counter(d, k)
    gamma_names = [e.name for e in counter_aut.events]
    obs_names = [e.name for e in a.events if e.observable]

    plus = lift_alphabet(_suffixed(a, "+", "none", "none"), gamma_names)
    minus = lift_alphabet(_suffixed(a, "-", "none", "none"), gamma_names)
    counter = lift_alphabet(counter_aut, obs_names, other_first=True)
    # the counter is entered only through the fresh event, never initially
    counter = Automaton(
        counter.states, counter.events, counter.transitions, frozenset(), counter.marked
    )

    merged = _union([a, plus, minus, counter])
    wiring = []
    for q in sorted(d.secret):
        wiring.append((a.states[q], at_event, a.states[q] + "+"))
        wiring.append((a.states[q], at_event, ca.initial))
    for q in sorted(d.nonsecret):
        wiring.append((a.states[q], at_event, a.states[q] + "-"))
    out_aut = _wire(merged, [Event(at_event, True)], wiring)

    sidx = {s: i for i, s in enumerate(out_aut.states)}
    counter_marked = {counter_aut.states[i] for i in counter_aut.marked}
    out = DES(
        out_aut,
        secret=frozenset(sidx[s + "+"] for s in a.states),
        nonsecret=frozenset(sidx[s + "-"] for s in a.states)
        | frozenset(sidx[s] for s in counter_marked),
        name=d.name + ".cso",
    )
    naming = {s: ("orig", s) for s in a.states}
    naming.update({s + "+": ("plus", s) for s in a.states})
    naming.update({s + "-": ("minus", s) for s in a.states})
    naming.update({s: ("counter", s) for s in counter_aut.states})
    claim = EquivalenceClaim("K-SO", "CSO", source_k=k, target_k=0)
    return _finish(out, claim, naming)


def kso_to_cso(d: DES, k, at_event: str = "@") -> TransformResult:
    """Bound-to-zero-step reduction without neutral states: the plus copy is
    synchronized with the step counter (all plus states initial and marked,
    so a pair is marked iff its counter half is); the non-marked pairs are
    the only secret states of the result."""
    _require_valid(d)
    if k == INF:
        res = inso_to_cso(d, at_event=at_event)
        return TransformResult(
            res.output, EquivalenceClaim("K-SO", "CSO", source_k=INF, target_k=0), res.naming
        )
    if not is_step_bound(k):
        raise ValueError(f"bad step bound: {k!r}")
    a = d.automaton
    _check_fresh((e.name for e in a.events), [at_event], "event")
    ca, counter_aut = _fresh_counter(d, k)
    gamma_names = [e.name for e in counter_aut.events]
    obs_names = [e.name for e in a.events if e.observable]

    from .automata import sync_product  # local to avoid a cycle at import time

    plus = lift_alphabet(_suffixed(a, "+", "all", "all"), gamma_names)
    minus = lift_alphabet(_suffixed(a, "-", "none", "none"), gamma_names)
    counter = lift_alphabet(counter_aut, obs_names, other_first=True)
    prod = sync_product(plus, counter)
    prod = Automaton(prod.states, prod.events, prod.transitions, frozenset(), prod.marked)

    merged = _union([a, minus, prod])
    wiring = []
    for q in sorted(d.secret):
        wiring.append((a.states[q], at_event, f"({a.states[q]}+,{ca.initial})"))
    for q in sorted(d.nonsecret):
        wiring.append((a.states[q], at_event, a.states[q] + "-"))
    out_aut = _wire(merged, [Event(at_event, True)], wiring)

    sidx = {s: i for i, s in enumerate(out_aut.states)}
    prod_marked = {prod.states[i] for i in prod.marked}
    secret = frozenset(sidx[s] for s in prod.states if s not in prod_marked)
    out = DES(
        out_aut,
        secret=secret,
        nonsecret=frozenset(range(out_aut.n)) - secret,
        name=d.name + ".cso",
    )
    naming = {s: ("orig", s) for s in a.states}
    naming.update({s + "-": ("minus", s) for s in a.states})
    naming.update({s: ("pair", s) for s in prod.states})
    claim = EquivalenceClaim("K-SO", "CSO", source_k=k, target_k=0)
    return _finish(out, claim, naming)


def _max_obs_steps(d: DES) -> list:
    """Per state, the supremum of observable-step counts over continuations
    (INF when an observable cycle is reachable)."""
    a = d.automaton
    n = a.n
    obs = {i for i, e in enumerate(a.events) if e.observable}
    edges: dict[int, list[tuple[int, int]]] = {q: [] for q in range(n)}
    for (p, e, q) in a.transitions:
        edges[p].append((e, q))

    # iterative Tarjan
    index = [-1] * n
    low = [0] * n
    on = [False] * n
    comp = [-1] * n
    stack: list[int] = []
    counter = 0
    ncomp = 0
    for root in range(n):
        if index[root] != -1:
            continue
        work = [(root, 0)]
        while work:
            v, pi = work[-1]
            if pi == 0:
                index[v] = low[v] = counter
                counter += 1
                stack.append(v)
                on[v] = True
            advanced = False
            for j in range(pi, len(edges[v])):
                _, w = edges[v][j]
                if index[w] == -1:
                    work[-1] = (v, j + 1)
                    work.append((w, 0))
                    advanced = True
                    break
                if on[w]:
                    low[v] = min(low[v], index[w])
            if advanced:
                continue
            if low[v] == index[v]:
                while True:
                    w = stack.pop()
                    on[w] = False
                    comp[w] = ncomp
                    if w == v:
                        break
                ncomp += 1
            work.pop()
            if work:
                pv, _ = work[-1]
                low[pv] = min(low[pv], low[v])

    inf_comp = [False] * ncomp
    for (p, e, q) in a.transitions:
        if comp[p] == comp[q] and e in obs:
            inf_comp[comp[p]] = True

    # condensation longest path; components numbered in reverse topological order
    val: list = [0] * ncomp
    for c in range(ncomp):
        if inf_comp[c]:
            val[c] = INF
    for c in range(ncomp):
        if val[c] == INF:
            continue
        best = 0
        for p in range(n):
            if comp[p] != c:
                continue
            for (e, q) in edges[p]:
                d2 = comp[q]
                if d2 == c:
                    continue
                cand = val[d2] + (1 if e in obs else 0)
                best = cand if cand > best else best
        val[c] = best
    # propagate INF upstream (a component reaching an INF component is INF)
    changed = True
    while changed:
        changed = False
        for p in range(n):
            for (e, q) in edges[p]:
                if comp[p] != comp[q] and val[comp[q]] == INF and val[comp[p]] != INF:
                    val[comp[p]] = INF
                    changed = True
    return [val[comp[q]] for q in range(n)]


def kso_to_cso_single_event(d: DES, k) -> TransformResult:
    """Single-observable-event variant: no new states, only relabeling. With
    a finite observation language the bound is checked directly on the
    estimate chain; otherwise states that can still make K observable steps
    are the only non-secret states of the result."""
    _require_valid(d)
    if not is_step_bound(k):
        raise ValueError(f"bad step bound: {k!r}")
    aev = _single_event_pre(d)
    a = d.automaton
    phi = _max_obs_steps(d)
    reach = _reachable_states(a)
    infinite = any(phi[q] == INF for q in reach)

    if not infinite:
        opaque = _single_event_kso_direct(d, k, phi, aev)
        if opaque:
            sec, ns = d.secret, d.nonsecret
        else:
            sec, ns = frozenset(range(a.n)), frozenset()
    else:
        ns = frozenset(q for q in d.nonsecret if phi[q] >= k)
        sec = frozenset(range(a.n)) - ns
    out = DES(a, sec, ns, name=d.name + ".cso")
    naming = {s: ("orig", s) for s in a.states}
    claim = EquivalenceClaim("K-SO", "CSO", source_k=k, target_k=0)
    return _finish(out, claim, naming)


def _single_event_kso_direct(d: DES, k, phi, aev: Event) -> bool:
    """Estimate-chain check for the finite-observations case: from every
    estimate, the deepest non-secret member must go at least as far (capped
    at k) as the deepest secret member."""
    a = d.automaton
    est = tables(d).init_mask
    smask = set_mask(d.secret)
    nmask = set_mask(d.nonsecret)
    steps = 0
    while est:
        assert steps <= a.n, "estimate chain must die when observations are finite"
        sec_depth = max((phi[x] for x in mask_bits(est & smask)), default=-1)
        if sec_depth >= 0:
            need = sec_depth if k == INF else min(sec_depth, k)
            ns_depth = max((phi[y] for y in mask_bits(est & nmask)), default=-1)
            if ns_depth < need:
                return False
        est = observer_step(d, est, aev.name)
        steps += 1
    return True


# ---------------------------------------------------------------------------
# Alphabet reduction and determinization


def encode_events(d: DES, gamma_o, code: dict | None = None) -> TransformResult:
    """Replace at least three observable events by fixed-width binary chains
    through fresh non-secret states (shared per source state and code
    prefix); zero-step opacity is preserved."""
    _require_valid(d)
    a = d.automaton
    gamma = sorted(set(gamma_o))
    if len(gamma) < 3:
        raise TransformPreconditionError("need at least three events to encode")
    enames = {e.name: e for e in a.events}
    for g in gamma:
        if g not in enames:
            raise TransformPreconditionError(f"unknown event {g!r}")
        if not enames[g].observable:
            raise TransformPreconditionError(f"event {g!r} is not observable")
    if code is None:
        width = max(1, ceil(log2(len(gamma))))
        code = {g: format(i, f"0{width}b") for i, g in enumerate(gamma)}
    widths = {len(v) for v in code.values()}
    if set(code) != set(gamma):
        raise TransformPreconditionError("code domain must equal the encoded event set")
    if len(widths) != 1:
        raise TransformPreconditionError("code words must share one width")
    (width,) = widths
    if width < 1 or width > ceil(log2(len(gamma))) + 1:
        raise TransformPreconditionError(f"code width {width} out of range")
    if len(set(code.values())) != len(code):
        raise TransformPreconditionError("code must be injective")
    _check_fresh((e.name for e in a.events), ["0", "1"], "event")

    gamma_set = set(gamma)
    events = [e for e in a.events if e.name not in gamma_set] + [Event("0"), Event("1")]
    states = list(a.states)
    sidx = {s: i for i, s in enumerate(states)}
    inter: dict[tuple[str, str], str] = {}

    def hop(p_name: str, prefix: str) -> str:
        key = (p_name, prefix)
        nm = inter.get(key)
        if nm is None:
            nm = f"{p_name}.{prefix}"
            if nm in sidx:
                raise NameCollisionError(f"fresh state {nm!r} already exists")
            inter[key] = nm
            sidx[nm] = len(states)
            states.append(nm)
        return nm

    trans_names = []
    by_name = sorted(
        (a.states[p], a.events[e].name, a.states[q]) for (p, e, q) in a.transitions
    )
    for (p, ename, q) in by_name:
        if ename not in gamma_set:
            trans_names.append((p, ename, q))
            continue
        bits = code[ename]
        cur = p
        for i in range(len(bits) - 1):
            nxt = hop(p, bits[: i + 1])
            trans_names.append((cur, bits[i], nxt))
            cur = nxt
        trans_names.append((cur, bits[-1], q))

    out_aut = build_automaton(
        states,
        [e.name for e in events],
        trans_names,
        [a.states[i] for i in sorted(a.initial)],
        marked=[a.states[i] for i in sorted(a.marked)],
        unobservable=[e.name for e in events if not e.observable],
    )
    new_idx = {s: i for i, s in enumerate(states)}
    out = DES(
        out_aut,
        secret=frozenset(new_idx[a.states[q]] for q in d.secret),
        nonsecret=frozenset(new_idx[a.states[q]] for q in d.nonsecret)
        | frozenset(new_idx[nm] for nm in inter.values()),
        name=d.name + ".bin",
    )
    naming = {s: ("orig", s) for s in a.states}
    naming.update({nm: ("encoder", p, pre) for (p, pre), nm in inter.items()})
    claim = EquivalenceClaim("CSO", "CSO", source_k=0, target_k=0)
    return _finish(out, claim, naming)


def cso_to_kso_two_events(d: DES, at_event: str = "@") -> TransformResult:
    """cso_to_kso followed by binary encoding of all observable events: the
    originals get 0-prefixed codes, the fresh event an all-ones code, leaving
    exactly two observable events."""
    _require_valid(d)
    obs = sorted(e.name for e in d.automaton.events if e.observable)
    if len(obs) < 2:
        raise TransformPreconditionError(
            "need at least two observable events; use the single-event variant instead"
        )
    first = cso_to_kso(d, at_event=at_event)
    width = max(1, ceil(log2(len(obs))))
    code = {nm: "0" + format(i, f"0{width}b") for i, nm in enumerate(obs)}
    code[at_event] = "1" * (width + 1)
    second = encode_events(first.output, obs + [at_event], code)
    naming = dict(second.naming)
    for s, prov in first.naming.items():
        if s in naming and naming[s] == ("orig", s):
            naming[s] = prov
    claim = EquivalenceClaim("CSO", "K-SO", source_k=0, target_k="any")
    out = DES(
        second.output.automaton,
        second.output.secret,
        second.output.nonsecret,
        name=d.name + ".kso2",
    )
    return _finish(out, claim, naming)


def determinize_preserving(d: DES, fresh_initial: str = "q.init") -> TransformResult:
    """Split every nondeterministic choice through a fresh state reached by a
    fresh unobservable event (one pair per replaced transition); multiple
    initial states get an unobservable fan-in from one fresh start. K-step
    opacity is preserved for every bound."""
    _require_valid(d)
    a = d.automaton
    by_pair: dict[tuple[int, int], list[int]] = {}
    for (p, e, q) in a.transitions:
        by_pair.setdefault((p, e), []).append(q)
    multi = {pe: sorted(qs) for pe, qs in by_pair.items() if len(qs) > 1}

    if not multi and len(a.initial) <= 1:
        claim = EquivalenceClaim("K-SO", "K-SO", source_k="any", target_k="any")
        return _finish(d, claim, {s: ("orig", s) for s in a.states})

    states = list(a.states)
    events = [e.name for e in a.events]
    unobs = [e.name for e in a.events if not e.observable]
    trans = [
        (a.states[p], a.events[e].name, a.states[q])
        for (p, e, q) in sorted(a.transitions)
        if (p, e) not in multi
    ]
    secret = {a.states[q] for q in d.secret}
    nonsecret = {a.states[q] for q in d.nonsecret}
    naming = {s: ("orig", s) for s in a.states}

    fresh_states = []
    fresh_events = []
    for (p, e) in sorted(multi):
        pn, en = a.states[p], a.events[e].name
        for q in multi[(p, e)]:
            qn = a.states[q]
            sp = f"{pn}.{en}.{qn}"
            ue = f"u.{pn}.{en}.{qn}"
            fresh_states.append(sp)
            fresh_events.append(ue)
            trans.append((pn, ue, sp))
            trans.append((sp, en, qn))
            naming[sp] = ("split", pn, en, qn)
            if p in d.secret:
                secret.add(sp)
            elif p in d.nonsecret:
                nonsecret.add(sp)

    initial = [a.states[i] for i in sorted(a.initial)]
    if len(a.initial) > 1:
        fresh_states.append(fresh_initial)
        naming[fresh_initial] = ("fresh", "initial-fan-in")
        for i in sorted(a.initial):
            ue = f"u.init.{a.states[i]}"
            fresh_events.append(ue)
            trans.append((fresh_initial, ue, a.states[i]))
        if a.initial <= d.secret:
            secret.add(fresh_initial)
        initial = [fresh_initial]

    _check_fresh(states, fresh_states, "state")
    _check_fresh(events, fresh_events, "event")
    out_aut = build_automaton(
        states + fresh_states,
        events + fresh_events,
        trans,
        initial,
        marked=[a.states[i] for i in sorted(a.marked)],
        unobservable=unobs + fresh_events,
    )
    sidx = {s: i for i, s in enumerate(out_aut.states)}
    out = DES(
        out_aut,
        secret=frozenset(sidx[s] for s in secret),
        nonsecret=frozenset(sidx[s] for s in nonsecret),
        name=d.name + ".det",
    )
    claim = EquivalenceClaim("K-SO", "K-SO", source_k="any", target_k="any")
    return _finish(out, claim, naming)
