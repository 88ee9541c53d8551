"""K-step opacity decision by level-bounded search of the estimator product.

For every reachable estimate X that contains a secret state x, the pair
(x, X restricted to non-secret states) seeds a product of the projected
automaton with the observer. The system is opaque for bound K iff no pair
with an empty right component is reachable from a seed within K observable
steps. The bound is clamped to the search cap before the BFS: marking
saturates after at most as many levels as there are product states, so
astronomically large bounds cost nothing extra.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import _kernel
from .automata import (
    DEFAULT_CAP,
    DES,
    INF,
    ObserverGraph,
    is_step_bound,
    mask_bits,
    observer_reach,
    set_mask,
    tables,
    validate,
)
from .errors import ValidationError

# keep the clamp within exact int64 range for the compiled kernel
_CAP_LIMIT = 1 << 60


@dataclass(frozen=True)
class Witness:
    """Observation-level evidence for a violation.

    ``s_obs`` drives the observer to the offending estimate X; from some
    secret member of X, ``t_obs`` (at most K observable steps) starves the
    non-secret side of the estimate.
    """

    s_obs: tuple[str, ...]
    t_obs: tuple[str, ...]


@dataclass(frozen=True)
class Verdict:
    opaque: bool
    witness: Witness | None = None


@dataclass(frozen=True)
class SearchStats:
    expansions: int
    levels: int
    product_states: int
    observer_states: int
    initial_pairs: int
    k_clamped: int
    backend: str


def _require_valid(d: DES) -> None:
    diags = validate(d)
    if diags:
        raise ValidationError(diags)


def _require_step_bound(k) -> None:
    if not is_step_bound(k):
        raise ValueError(f"bad step bound: {k!r}")


def initial_pairs(d: DES, cap: int = DEFAULT_CAP) -> set[tuple[int, int]]:
    """Seed pairs: one (x, estimate & nonsecret) per reachable estimate and
    secret member x of it."""
    _require_valid(d)
    obs = observer_reach(d, cap=cap)
    return set(_roots(d, obs))


def _roots(d: DES, obs: ObserverGraph) -> list[tuple[int, int]]:
    smask = set_mask(d.secret)
    nmask = set_mask(d.nonsecret)
    out = []
    seen = set()
    for xm in obs.masks:
        zm = xm & nmask
        for x in mask_bits(xm & smask):
            key = (x, zm)
            if key not in seen:
                seen.add(key)
                out.append(key)
    return out


def verify_kso(
    d: DES,
    k,
    cap: int = DEFAULT_CAP,
    backend: str | None = None,
    extract_witness: bool = True,
) -> Verdict:
    verdict, _ = verify_kso_detailed(
        d, k, cap=cap, backend=backend, extract_witness=extract_witness
    )
    return verdict


def verify_kso_detailed(
    d: DES,
    k,
    cap: int = DEFAULT_CAP,
    backend: str | None = None,
    extract_witness: bool = True,
) -> tuple[Verdict, SearchStats]:
    """Decide K-step opacity; also report search-size counters."""
    _require_valid(d)
    _require_step_bound(k)
    cap = min(cap, _CAP_LIMIT)
    t = tables(d)
    obs = observer_reach(d, cap=cap, backend=backend)
    roots = _roots(d, obs)
    k_cap = cap if k == INF else min(int(k), cap)
    kern = _kernel.get_kernel(backend)
    found, expansions, levels, nvis = kern.product_bfs(
        t.n, t.gamma_lists(), roots, k_cap, cap
    )
    stats = SearchStats(
        expansions=expansions,
        levels=levels,
        product_states=nvis,
        observer_states=len(obs.masks),
        initial_pairs=len(roots),
        k_clamped=k_cap,
        backend=getattr(kern, "name", "?"),
    )
    if not found:
        return Verdict(True), stats
    witness = _extract_witness(d, obs, roots, k_cap) if extract_witness else None
    return Verdict(False, witness), stats


def verify_cso(d: DES, **kw) -> Verdict:
    """Current-state opacity: the zero-step bound."""
    return verify_kso(d, 0, **kw)


def verify_inso(d: DES, **kw) -> Verdict:
    """Infinite-step opacity: the search runs to saturation."""
    return verify_kso(d, INF, **kw)


# ---------------------------------------------------------------------------
# Witness extraction. Runs only on violations and re-traverses with parent
# tracking; the decision path above stays bookkeeping-free. Ties are broken
# by smallest (|s|, |t|, s, t) so test output is deterministic.


def _extract_witness(d, obs: ObserverGraph, roots, k_cap) -> Witness:
    t = tables(d)
    a = d.automaton
    names = [a.events[i].name for i in obs.obs_events]
    order = sorted(range(len(names)), key=lambda p: names[p])

    # lexicographically-least shortest observation per reachable estimate
    sbest: dict[int, tuple[str, ...]] = {0: ()}
    queue = [0]
    while queue:
        nq = []
        for zi in queue:
            for p in order:
                zj = obs.trans[zi][p]
                if zj not in sbest:
                    sbest[zj] = sbest[zi] + (names[p],)
                    nq.append(zj)
        queue = nq

    smask = set_mask(d.secret)
    nmask = set_mask(d.nonsecret)
    best_s: dict[tuple[int, int], tuple[str, ...]] = {}
    for zi, xm in enumerate(obs.masks):
        s = sbest[zi]
        zm = xm & nmask
        for x in mask_bits(xm & smask):
            key = (x, zm)
            cur = best_s.get(key)
            if cur is None or (len(s), s) < (len(cur), cur):
                best_s[key] = s

    groups: dict[int, list[tuple[int, int]]] = {}
    for key, s in best_s.items():
        groups.setdefault(len(s), []).append(key)

    for slen in sorted(groups):
        cands = []
        for (x, zm) in sorted(groups[slen], key=lambda kv: (best_s[kv], kv[0])):
            hit = _first_violation_from(t, x, zm, k_cap, order, names)
            if hit is not None:
                tlen, tw = hit
                cands.append((tlen, best_s[(x, zm)], tw))
        if cands:
            tlen, s, tw = min(cands)
            return Witness(s, tw)
    raise AssertionError("violation reported but no witness found")


def _first_violation_from(t, x, zm, k_cap, order, names):
    """Shortest, then lexicographically least, observation emptying the
    estimate while the secret-side state survives; None if none within k_cap."""
    if zm == 0:
        return (0, ())
    zsucc: dict[int, list[int]] = {}

    def zrow(z):
        row = zsucc.get(z)
        if row is None:
            row = []
            for p in order:
                g = t.gamma[p]
                acc = 0
                for q in mask_bits(z):
                    acc |= g[q]
                row.append(acc)
            zsucc[z] = row
        return row

    seen = {(x, zm)}
    frontier: list[tuple[int, int, tuple[str, ...]]] = [(x, zm, ())]
    level = 0
    while frontier and level < k_cap:
        nxt = []
        for (q, z, tw) in frontier:
            row = zrow(z)
            for i, p in enumerate(order):
                lefts = t.gamma[p][q]
                if not lefts:
                    continue
                z2 = row[i]
                for q2 in mask_bits(lefts):
                    key = (q2, z2)
                    if key in seen:
                        continue
                    seen.add(key)
                    tw2 = tw + (names[p],)
                    if z2 == 0:
                        return (level + 1, tw2)
                    nxt.append((q2, z2, tw2))
        level += 1
        frontier = nxt
    return None
