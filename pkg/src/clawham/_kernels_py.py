"""Bitmask kernels for small labelled graphs (pure-Python fallback).

A graph on vertices ``0..n-1`` is a list ``adj`` of neighbour bitmasks.
Labelled graphs are numbered by ``code``: bit ``k`` of the code is the
``k``-th pair of ``itertools.combinations(range(n), 2)``.

The compiled module ``_kernels`` exports the same names with the same
semantics; ``clawham.kernels`` picks one at import.
"""

from __future__ import annotations

TWO_CONNECTED = 1
CLAW_FREE = 2
PAW_FREE = 4
PHI_OK = 8
HAMILTONIAN = 16


def pair_table(n):
    return [(i, j) for i in range(n) for j in range(i + 1, n)]


def adjacency_from_code(n, code):
    adj = [0] * n
    k = 0
    for i in range(n):
        for j in range(i + 1, n):
            if code >> k & 1:
                adj[i] |= 1 << j
                adj[j] |= 1 << i
            k += 1
    return adj


def _reach(adj, start, allowed):
    seen = 1 << start
    frontier = seen
    while frontier:
        nxt = 0
        f = frontier
        while f:
            low = f & -f
            nxt |= adj[low.bit_length() - 1]
            f ^= low
        nxt &= allowed & ~seen
        seen |= nxt
        frontier = nxt
    return seen


def is_connected_mask(adj, n, removed=0):
    allowed = ((1 << n) - 1) & ~removed
    if not allowed:
        return True
    start = (allowed & -allowed).bit_length() - 1
    return _reach(adj, start, allowed) == allowed


def is_two_connected_mask(adj, n):
    if n < 3:
        return False
    for v in range(n):
        if bin(adj[v]).count("1") < 2:
            return False
    if not is_connected_mask(adj, n):
        return False
    for v in range(n):
        if not is_connected_mask(adj, n, 1 << v):
            return False
    return True


def find_claw_mask(adj, n):
    """First claw ``(centre, a, b, c)`` in lexicographic order, or None."""
    for c in range(n):
        nb = [x for x in range(n) if adj[c] >> x & 1]
        m = len(nb)
        for i in range(m):
            a = nb[i]
            for j in range(i + 1, m):
                b = nb[j]
                if adj[a] >> b & 1:
                    continue
                for k in range(j + 1, m):
                    d = nb[k]
                    if not (adj[a] >> d & 1) and not (adj[b] >> d & 1):
                        return (c, a, b, d)
    return None


def paw_scan_mask(adj, n):
    """Return ``(paw_count, phi_ok)`` over all induced paws.

    ``phi_ok`` is true iff every paw has a common neighbour of ``a1`` and
    ``b1`` or of ``a1`` and ``b2`` outside the paw.
    """
    count = 0
    phi_ok = True
    for a0 in range(n):
        nb = adj[a0]
        b1 = 0
        while b1 < n:
            if nb >> b1 & 1:
                b2 = b1 + 1
                while b2 < n:
                    if nb >> b2 & 1 and adj[b1] >> b2 & 1:
                        # triangle a0 b1 b2; pendant a1 on a0 only
                        cand = nb & ~adj[b1] & ~adj[b2] & ~(1 << b1) & ~(1 << b2)
                        while cand:
                            low = cand & -cand
                            a1 = low.bit_length() - 1
                            cand ^= low
                            count += 1
                            outside = ~((1 << a0) | (1 << a1) | (1 << b1) | (1 << b2))
                            if not (adj[a1] & adj[b1] & outside) and not (adj[a1] & adj[b2] & outside):
                                phi_ok = False
                    b2 += 1
            b1 += 1
    return count, phi_ok


def hamilton_cycle_mask(adj, n):
    """Backtracking Hamilton cycle from vertex 0, ascending neighbour order,
    pruning when an unvisited vertex keeps fewer than two usable neighbours.
    Returns the vertex order or None."""
    if n < 3:
        return None
    full = (1 << n) - 1
    for v in range(n):
        if bin(adj[v]).count("1") < 2:
            return None
    path = [0]

    def viable(visited, last):
        free = full & ~visited
        ends = (1 << last) | 1
        f = free
        while f:
            low = f & -f
            v = low.bit_length() - 1
            f ^= low
            usable = adj[v] & (free | ends)
            if usable & (usable - 1) == 0:
                return False
        return True

    def extend(visited, last):
        if visited == full:
            return adj[last] & 1
        cand = adj[last] & ~visited
        while cand:
            low = cand & -cand
            v = low.bit_length() - 1
            cand ^= low
            nv = visited | low
            if nv != full and not viable(nv, v):
                continue
            path.append(v)
            if extend(nv, v):
                return True
            path.pop()
        return False

    return list(path) if extend(1, 0) else None


def cycle_spectrum_mask(adj, n):
    """Bitmask with bit ``l`` set iff some cycle has length ``l``.

    Depth-first enumeration of simple cycles rooted at their smallest
    vertex; stops early once every length ``3..n`` is present.
    """
    want = 0
    for l in range(3, n + 1):
        want |= 1 << l
    found = 0
    for s in range(n):
        allowed = ((1 << n) - 1) & ~((1 << s) - 1)
        stack = [(s, 1 << s, 1, adj[s] & allowed & ~(1 << s))]
        while stack:
            v, visited, length, cand = stack[-1]
            if not cand:
                stack.pop()
                continue
            low = cand & -cand
            w = low.bit_length() - 1
            stack[-1] = (v, visited, length, cand ^ low)
            if length >= 2 and adj[w] >> s & 1:
                found |= 1 << (length + 1)
                if found & want == want:
                    return found
            nxt = adj[w] & allowed & ~(visited | low)
            if nxt:
                stack.append((w, visited | low, length + 1, nxt))
    return found


def classify_code(n, code):
    """Return ``(flags, spectrum)`` for the labelled graph ``code``.

    Paw, Hamiltonicity and spectrum data are only computed for 2-connected
    claw-free graphs; ``spectrum`` is 0 otherwise.
    """
    adj = adjacency_from_code(n, code)
    return classify_adj(adj, n)


def classify_adj(adj, n):
    flags = 0
    if not is_two_connected_mask(adj, n):
        return flags, 0
    flags |= TWO_CONNECTED
    if find_claw_mask(adj, n) is not None:
        return flags, 0
    flags |= CLAW_FREE
    count, phi_ok = paw_scan_mask(adj, n)
    if count == 0:
        flags |= PAW_FREE
    if phi_ok:
        flags |= PHI_OK
    if hamilton_cycle_mask(adj, n) is not None:
        flags |= HAMILTONIAN
    return flags, cycle_spectrum_mask(adj, n)


def scan_codes(n, start, stop):
    """Classify codes ``start..stop-1``; return the 2-connected claw-free
    ones as parallel lists ``(codes, flags, spectra)``."""
    codes, flag_list, spectra = [], [], []
    pairs = pair_table(n)
    for code in range(start, stop):
        adj = [0] * n
        c = code
        k = 0
        while c:
            if c & 1:
                i, j = pairs[k]
                adj[i] |= 1 << j
                adj[j] |= 1 << i
            c >>= 1
            k += 1
        flags, spec = classify_adj(adj, n)
        if flags & CLAW_FREE:
            codes.append(code)
            flag_list.append(flags)
            spectra.append(spec)
    return codes, flag_list, spectra
