"""Seeded random instance generator for the differential suites."""

from __future__ import annotations

import random
from dataclasses import dataclass

from .automata import DES, build_des


@dataclass(frozen=True)
class RandomSpec:
    n_states: int
    n_events: int  # total, unobservable included
    n_unobservable: int
    transition_density: float  # chance of a transition per (state, event)
    secret_fraction: float
    nonsecret_fraction: float
    seed: int

    def check(self):
        if self.n_states < 1 or self.n_events < 0:
            raise ValueError("need at least one state and a non-negative event count")
        if not 0 <= self.n_unobservable <= self.n_events:
            raise ValueError("unobservable count out of range")
        if not 0 < self.transition_density <= 1:
            raise ValueError("density must be in (0, 1]")
        if self.secret_fraction < 0 or self.nonsecret_fraction < 0 or (
            self.secret_fraction + self.nonsecret_fraction > 1
        ):
            raise ValueError("fractions must be non-negative and sum to at most 1")


_OBS_NAMES = "abcdefgh"


def gen_random(spec: RandomSpec) -> DES:
    """Deterministic in the seed. States may be unreachable by design."""
    spec.check()
    rng = random.Random(spec.seed)
    states = [f"s{i}" for i in range(spec.n_states)]
    n_obs = spec.n_events - spec.n_unobservable
    events = [(_OBS_NAMES[i] if i < len(_OBS_NAMES) else f"o{i}") for i in range(n_obs)]
    unobs = [f"u{i}" for i in range(spec.n_unobservable)]
    events += unobs

    trans = []
    for s in states:
        for e in events:
            if rng.random() < spec.transition_density:
                trans.append((s, e, rng.choice(states)))
                if rng.random() < spec.transition_density * 0.3:
                    trans.append((s, e, rng.choice(states)))

    initial = {rng.choice(states)}
    if rng.random() < 0.3:
        initial.add(rng.choice(states))

    n_secret = round(spec.n_states * spec.secret_fraction)
    n_nonsecret = min(round(spec.n_states * spec.nonsecret_fraction),
                      spec.n_states - n_secret)
    shuffled = states[:]
    rng.shuffle(shuffled)
    secret = shuffled[:n_secret]
    nonsecret = shuffled[n_secret:n_secret + n_nonsecret]

    return build_des(
        states=states,
        events=events,
        trans=trans,
        initial=sorted(initial),
        secret=secret,
        nonsecret=nonsecret,
        unobservable=unobs,
        name=f"r{spec.seed}",
    )
