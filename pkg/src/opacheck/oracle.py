"""Ground-truth opacity decision by exhaustive string-space search.

Exists to be obviously correct, not fast. The search walks every generated
string (memoizing on the pair of reached state sets so it terminates): the
prefix part tracks (concrete reach set, estimate); once a secret state is
reached, the continuation part tracks (secret-side reach set, non-secret-side
set propagated through matching observations, observable step count). A
violation is a continuation that keeps the secret side alive with at most K
observable steps while the non-secret side dies.

If no violation is found but the search was cut off by the length budget and
the budget is below the pumping bound (every violation can be shortened to at
most 2^n*(n+1) + min(K, 2^n) symbols by cutting repeated search states), the
result is reported as inconclusive rather than opaque.
"""

from __future__ import annotations

from dataclasses import dataclass

from .automata import DES, INF, is_step_bound, mask_bits, set_mask, tables, validate
from .errors import InconclusiveBoundError, ValidationError
from .verify import Verdict, Witness


@dataclass(frozen=True)
class OracleConfig:
    max_len: int  # total string length budget, continuation included
    k: object  # step bound: non-negative int or INF

    def check(self):
        if not isinstance(self.max_len, int) or self.max_len < 1:
            raise ValueError(f"max_len must be a positive int, got {self.max_len!r}")
        if not is_step_bound(self.k):
            raise ValueError(f"bad step bound: {self.k!r}")


def sufficient_max_len(n: int, k) -> int:
    """Length budget beyond which a missing violation cannot hide."""
    cap = 2**n if k == INF else min(k, 2**n)
    return 2**n * (n + 1) + cap


def oracle_kso(d: DES, cfg: OracleConfig) -> Verdict:
    diags = validate(d)
    if diags:
        raise ValidationError(diags)
    cfg.check()
    t = tables(d)
    a = d.automaton
    n = t.n
    smask = set_mask(d.secret)
    nmask = set_mask(d.nonsecret)
    max_len = cfg.max_len
    kc = max_len if cfg.k == INF else min(int(cfg.k), max_len)

    order = sorted(range(len(a.events)), key=lambda e: a.events[e].name)
    obs_flags = [a.events[e].observable for e in range(len(a.events))]
    enames = [a.events[e].name for e in range(len(a.events))]

    def step(row, mask):
        acc = 0
        for q in mask_bits(mask):
            acc |= row[q]
        return acc

    truncated = False
    tmemo: dict[tuple[int, int], tuple[bool, tuple | None, bool]] = {}

    def continuation_check(b0: int, z0raw: int, budget: int):
        """Search continuations from secret side b0 against non-secret set
        z0raw; returns (violating, observation, cut_off)."""
        nonlocal truncated
        key = (b0, z0raw)
        hit = tmemo.get(key)
        if hit is not None:
            return hit
        z0 = t.close(z0raw)
        if z0 == 0:
            res = (True, (), False)
            tmemo[key] = res
            return res
        cut = False
        seen = {(b0, z0, 0): 0}
        frontier = [(b0, z0, 0, ())]
        length = 0
        found = None
        while frontier and found is None:
            nxt = []
            length += 1
            for (b, z, c, tp) in frontier:
                for e in order:
                    b2 = step(t.raw[e], b)
                    if not b2:
                        continue
                    if obs_flags[e]:
                        c2 = c + 1
                        if c2 > kc:
                            continue
                        z2 = t.close(step(t.raw[e], z))
                        tp2 = tp + (enames[e],)
                    else:
                        c2, z2, tp2 = c, z, tp
                    if length > budget:
                        cut = True
                        continue
                    if z2 == 0:
                        found = tp2
                        break
                    nkey = (b2, z2, c2)
                    if nkey in seen:
                        continue
                    seen[nkey] = length
                    nxt.append((b2, z2, c2, tp2))
                if found is not None:
                    break
            frontier = nxt
        res = (found is not None, found, cut)
        tmemo[key] = res
        return res

    init_a = set_mask(a.initial)
    init_x = t.init_mask
    seen_cfg = {(init_a, init_x)}
    frontier = [(init_a, init_x, ())]
    slen = 0
    while frontier:
        for (am, xm, sp) in frontier:
            if am & smask:
                found, tp, cut = continuation_check(am & smask, xm & nmask, max_len - slen)
                if found:
                    return Verdict(False, Witness(sp, tp))
                if cut:
                    truncated = True
        nxt = []
        slen += 1
        for (am, xm, sp) in frontier:
            for e in order:
                a2 = step(t.raw[e], am)
                if not a2:
                    continue
                if obs_flags[e]:
                    x2 = t.close(step(t.raw[e], xm))
                    sp2 = sp + (enames[e],)
                else:
                    x2, sp2 = xm, sp
                key = (a2, x2)
                if key in seen_cfg:
                    continue
                if slen > max_len:
                    truncated = True
                    continue
                seen_cfg.add(key)
                nxt.append((a2, x2, sp2))
        frontier = nxt

    if truncated and max_len < sufficient_max_len(n, cfg.k):
        raise InconclusiveBoundError(
            f"no violation within length {max_len}, but the search was cut off; "
            f"a budget of {sufficient_max_len(n, cfg.k)} decides conclusively"
        )
    return Verdict(True)


def oracle_cso(d: DES, max_len: int) -> Verdict:
    """Current-state opacity by exhaustive search: the zero-step bound."""
    return oracle_kso(d, OracleConfig(max_len=max_len, k=0))


# ---------------------------------------------------------------------------
# Literal double-enumeration mode: string pairs instead of set propagation.
# Exponential; debugging aid for cross-checking the set-based search on tiny
# systems. The inner existential search shares the same length budget, so a
# matching pair longer than max_len counts as absent.


def oracle_kso_strings(d: DES, cfg: OracleConfig) -> Verdict:
    diags = validate(d)
    if diags:
        raise ValidationError(diags)
    cfg.check()
    t = tables(d)
    a = d.automaton
    smask = set_mask(d.secret)
    nmask = set_mask(d.nonsecret)
    order = sorted(range(len(a.events)), key=lambda e: a.events[e].name)
    enames = [e.name for e in a.events]
    obs_flags = [e.observable for e in a.events]

    def step(row, mask):
        acc = 0
        for q in mask_bits(mask):
            acc |= row[q]
        return acc

    def proj(word):
        return tuple(enames[e] for e in word if obs_flags[e])

    def matching_exists(sp, tp):
        # any s' with view sp reaching a non-secret state from which some t'
        # with view tp survives
        def walk(mask, view, budget):
            # all reach sets after strings with the given remaining view
            out = set()
            stack = [(mask, 0, budget)]
            seen = set()
            while stack:
                m, i, left = stack.pop()
                if (m, i) in seen:
                    continue
                seen.add((m, i))
                if i == len(view):
                    out.add(m)
                if left == 0:
                    continue
                for e in order:
                    m2 = step(t.raw[e], m)
                    if not m2:
                        continue
                    if obs_flags[e]:
                        if i < len(view) and enames[e] == view[i]:
                            stack.append((m2, i + 1, left - 1))
                    else:
                        stack.append((m2, i, left - 1))
            return out

        for m in walk(set_mask(a.initial), sp, cfg.max_len):
            ns = m & nmask
            if not ns:
                continue
            for m2 in walk(ns, tp, cfg.max_len):
                if m2:
                    return True
        return False

    kc = cfg.max_len if cfg.k == INF else min(int(cfg.k), cfg.max_len)
    frontier = [(set_mask(a.initial), ())]
    for _ in range(cfg.max_len + 1):
        for (am, word) in frontier:
            for i in range(len(word) + 1):
                s, tw = word[:i], word[i:]
                if len(proj(tw)) > kc:
                    continue
                # recompute the split: reach after s, then continue with tw
                ms = set_mask(a.initial)
                for e in s:
                    ms = step(t.raw[e], ms)
                sec = ms & smask
                if not sec:
                    continue
                mt = sec
                for e in tw:
                    mt = step(t.raw[e], mt)
                if not mt:
                    continue
                if not matching_exists(proj(s), proj(tw)):
                    return Verdict(
                        False, Witness(proj(s), proj(tw))
                    )
        nxt = []
        for (am, word) in frontier:
            if len(word) >= cfg.max_len:
                continue
            for e in order:
                a2 = step(t.raw[e], am)
                if a2:
                    nxt.append((a2, word + (e,)))
        frontier = nxt
        if not frontier:
            break
    return Verdict(True)
