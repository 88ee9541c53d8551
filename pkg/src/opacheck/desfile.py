"""Line-oriented textual format for labeled systems.

Canonical form (serialize) has fixed section order, sorted tokens, one
transition per line; parse(serialize(d)) is structurally the identity and
serializing a parsed canonical file reproduces it byte for byte.

    # comment
    des <name>
    events: <tok> ...
    unobservable: <tok> ...        (omitted when empty)
    states: <tok> ...
    initial: <tok> ...
    secret: <tok> ...
    nonsecret: <tok> ...
    marked: <tok> ...              (omitted when empty)
    trans:
    <src> <event> <dst>
"""

from __future__ import annotations

from .automata import DES, build_des, validate
from .errors import DesParseError, ValidationError


def _lines(text: str):
    for no, raw in enumerate(text.splitlines(), start=1):
        cut = raw.find("#")
        if cut != -1:
            raw = raw[:cut]
        toks = raw.split()
        if toks:
            yield no, toks


def parse(text: str) -> DES:
    """Parse and validate a document; raises DesParseError with a line
    number, or ValidationError with forwarded diagnostics."""
    it = _lines(text)

    def next_line(expect: str | None = None):
        try:
            no, toks = next(it)
        except StopIteration:
            raise DesParseError(0, f"unexpected end of document (wanted {expect})") from None
        return no, toks

    no, toks = next_line("des header")
    if toks[0] != "des" or len(toks) != 2:
        raise DesParseError(no, "expected header: des <name>")
    name = toks[1]

    sections = ["events:", "unobservable:", "states:", "initial:",
                "secret:", "nonsecret:", "marked:", "trans:"]
    optional = {"unobservable:", "marked:"}
    got: dict[str, list[str]] = {}
    want = 0
    while want < len(sections):
        no, toks = next_line(sections[want])
        head = toks[0]
        while head != sections[want]:
            if sections[want] in optional:
                got[sections[want]] = []
                want += 1
                if want >= len(sections):
                    raise DesParseError(no, f"unexpected section {head!r}")
                continue
            raise DesParseError(no, f"expected section {sections[want]!r}, found {head!r}")
        got[head] = toks[1:]
        if head == "trans:":
            if len(toks) != 1:
                raise DesParseError(no, "transitions start on the following lines")
            break
        want += 1

    trans = []
    for no, toks in it:
        if len(toks) != 3:
            raise DesParseError(no, f"expected '<src> <event> <dst>', found {' '.join(toks)!r}")
        trans.append((no, tuple(toks)))

    declared_states = set(got["states:"])
    declared_events = set(got["events:"])
    for no, (p, e, q) in trans:
        for s in (p, q):
            if s not in declared_states:
                raise DesParseError(no, f"undeclared state {s!r}")
        if e not in declared_events:
            raise DesParseError(no, f"undeclared event {e!r}")
    for section in ("initial:", "secret:", "nonsecret:", "marked:", "unobservable:"):
        pool = declared_events if section == "unobservable:" else declared_states
        for tok in got.get(section, []):
            if tok not in pool:
                raise DesParseError(0, f"undeclared token {tok!r} in section {section}")

    d = build_des(
        states=got["states:"],
        events=got["events:"],
        trans=[t for _, t in trans],
        initial=got["initial:"],
        secret=got["secret:"],
        nonsecret=got["nonsecret:"],
        marked=got.get("marked:", []),
        unobservable=got.get("unobservable:", []),
        name=name,
    )
    diags = validate(d)
    if diags:
        raise ValidationError(diags)
    return d


def serialize(d: DES) -> str:
    a = d.automaton
    out = [f"des {d.name}"]

    def section(label, names):
        body = " ".join(sorted(names))
        out.append(f"{label} {body}" if body else label)

    section("events:", (e.name for e in a.events))
    unobs = [e.name for e in a.events if not e.observable]
    if unobs:
        section("unobservable:", unobs)
    section("states:", a.states)
    section("initial:", (a.states[i] for i in a.initial))
    section("secret:", (a.states[i] for i in d.secret))
    section("nonsecret:", (a.states[i] for i in d.nonsecret))
    if a.marked:
        section("marked:", (a.states[i] for i in a.marked))
    out.append("trans:")
    for (p, e, q) in sorted(
        (a.states[p], a.events[e].name, a.states[q]) for (p, e, q) in a.transitions
    ):
        out.append(f"{p} {e} {q}")
    return "\n".join(out) + "\n"


def same_structure(x: DES, y: DES) -> bool:
    """Name-level equality: same labeled relation regardless of index order."""
    ax, ay = x.automaton, y.automaton
    def view(d, a):
        return (
            d.name,
            frozenset(a.states),
            frozenset((e.name, e.observable) for e in a.events),
            frozenset((a.states[p], a.events[e].name, a.states[q]) for (p, e, q) in a.transitions),
            frozenset(a.states[i] for i in a.initial),
            frozenset(a.states[i] for i in a.marked),
            frozenset(a.states[i] for i in d.secret),
            frozenset(a.states[i] for i in d.nonsecret),
        )
    return view(x, ax) == view(y, ay)
