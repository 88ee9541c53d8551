"""Pure-Python search kernels.

The compiled extension mirrors these two functions exactly: same visit
order, same counters, same exceptions. Estimates are int bitmasks; ``gamma``
is a per-observable-event list of per-state successor masks with
unobservable closure already folded in.
"""

from ..errors import StateSpaceLimitError

name = "pure"


def observer_reach(n, gamma, init_mask, cap):
    """BFS over estimates from ``init_mask``; returns (masks, trans) where
    trans[i][p] indexes the successor estimate under observable event p."""
    ne = len(gamma)
    masks = [init_mask]
    index = {init_mask: 0}
    trans = []
    pos = 0
    while pos < len(masks):
        zm = masks[pos]
        pos += 1
        row = []
        for e in range(ne):
            g = gamma[e]
            nm = 0
            m = zm
            while m:
                b = m & -m
                nm |= g[b.bit_length() - 1]
                m ^= b
            zi = index.get(nm)
            if zi is None:
                zi = len(masks)
                if zi >= cap:
                    raise StateSpaceLimitError(
                        f"observer exceeds cap of {cap} states; raise the cap if intended"
                    )
                index[nm] = zi
                masks.append(nm)
            row.append(zi)
        trans.append(row)
    return masks, trans


def product_bfs(n, gamma, roots, k_cap, cap):
    """Level-bounded BFS over (state, estimate) pairs from ``roots``.

    Counts observable steps; stops after ``k_cap`` levels or saturation.
    Returns (violation_found, expansions, levels, visited) where a violation
    is any visited pair whose estimate is empty. Deterministic: events in
    given order, successor states ascending, FIFO frontier.
    """
    ne = len(gamma)
    zmasks = []
    zindex = {}
    zrows = []

    def zid(zm):
        zi = zindex.get(zm)
        if zi is None:
            zi = len(zmasks)
            zindex[zm] = zi
            zmasks.append(zm)
            zrows.append(None)
        return zi

    visited = []  # per estimate id: bitmask over left states

    def mark(q, zi):
        while len(visited) <= zi:
            visited.append(0)
        b = 1 << q
        if visited[zi] & b:
            return False
        visited[zi] |= b
        return True

    queue = []
    nvis = 0
    for (q, zm) in roots:
        zi = zid(zm)
        if mark(q, zi):
            nvis += 1
            if nvis > cap:
                raise StateSpaceLimitError(
                    f"product exceeds cap of {cap} states; raise the cap if intended"
                )
            queue.append((q, zi))
    for (q, zi) in queue:
        if zmasks[zi] == 0:
            return True, 0, 0, nvis

    level = 0
    expansions = 0
    while queue and level < k_cap:
        nxt = []
        for (q, zi) in queue:
            expansions += 1
            row = zrows[zi]
            if row is None:
                zm = zmasks[zi]
                row = []
                for e in range(ne):
                    g = gamma[e]
                    nm = 0
                    m = zm
                    while m:
                        b = m & -m
                        nm |= g[b.bit_length() - 1]
                        m ^= b
                    row.append(zid(nm))
                zrows[zi] = row
            for e in range(ne):
                qs = gamma[e][q]
                if not qs:
                    continue
                zi2 = row[e]
                viol = zmasks[zi2] == 0
                m = qs
                while m:
                    b = m & -m
                    q2 = b.bit_length() - 1
                    m ^= b
                    if mark(q2, zi2):
                        nvis += 1
                        if nvis > cap:
                            raise StateSpaceLimitError(
                                f"product exceeds cap of {cap} states; raise the cap if intended"
                            )
                        if viol:
                            return True, expansions, level + 1, nvis
                        nxt.append((q2, zi2))
        level += 1
        queue = nxt
    return False, expansions, level, nvis
