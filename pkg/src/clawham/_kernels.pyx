# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled bitmask kernels.  Same names and results as ``_kernels_py``.

Graphs have at most 32 vertices here; adjacency rows are ``uint32``.
"""

from libc.stdint cimport uint32_t, uint64_t

TWO_CONNECTED = 1
CLAW_FREE = 2
PAW_FREE = 4
PHI_OK = 8
HAMILTONIAN = 16

DEF MAXN = 32


cdef inline int _popcount(uint32_t x) nogil:
    return __builtin_popcount(x)


cdef inline int _ctz(uint32_t x) nogil:
    return __builtin_ctz(x)


cdef extern from *:
    int __builtin_popcount(unsigned int) nogil
    int __builtin_ctz(unsigned int) nogil


cdef int _load(object adj, int n, uint32_t* out) except -1:
    if n > MAXN:
        raise ValueError("compiled kernels support at most 32 vertices")
    cdef int i
    for i in range(n):
        out[i] = <uint32_t> adj[i]
    return 0


cdef void _from_code(int n, uint64_t code, uint32_t* adj) nogil:
    cdef int i, j, k = 0
    for i in range(n):
        adj[i] = 0
    for i in range(n):
        for j in range(i + 1, n):
            if (code >> k) & 1:
                adj[i] |= (<uint32_t> 1) << j
                adj[j] |= (<uint32_t> 1) << i
            k += 1


cdef uint32_t _reach(const uint32_t* adj, int start, uint32_t allowed) nogil:
    cdef uint32_t seen = (<uint32_t> 1) << start
    cdef uint32_t frontier = seen, nxt, f, low
    while frontier:
        nxt = 0
        f = frontier
        while f:
            low = f & (~f + 1)
            nxt |= adj[_ctz(low)]
            f ^= low
        nxt &= allowed & ~seen
        seen |= nxt
        frontier = nxt
    return seen


cdef inline uint32_t _full(int n) nogil:
    if n >= 32:
        return <uint32_t> 0xFFFFFFFF
    return ((<uint32_t> 1) << n) - 1


cdef bint _connected(const uint32_t* adj, int n, uint32_t removed) nogil:
    cdef uint32_t allowed = _full(n) & ~removed
    if allowed == 0:
        return True
    return _reach(adj, _ctz(allowed), allowed) == allowed


cdef bint _two_connected(const uint32_t* adj, int n) nogil:
    cdef int v
    if n < 3:
        return False
    for v in range(n):
        if _popcount(adj[v]) < 2:
            return False
    if not _connected(adj, n, 0):
        return False
    for v in range(n):
        if not _connected(adj, n, (<uint32_t> 1) << v):
            return False
    return True


cdef bint _claw(const uint32_t* adj, int n, int* out) nogil:
    cdef int c, a, b, d
    cdef uint32_t nb
    for c in range(n):
        nb = adj[c]
        for a in range(n):
            if not (nb >> a) & 1:
                continue
            for b in range(a + 1, n):
                if not (nb >> b) & 1 or (adj[a] >> b) & 1:
                    continue
                for d in range(b + 1, n):
                    if (nb >> d) & 1 and not (adj[a] >> d) & 1 and not (adj[b] >> d) & 1:
                        out[0] = c
                        out[1] = a
                        out[2] = b
                        out[3] = d
                        return True
    return False


cdef void _paws(const uint32_t* adj, int n, long* count, bint* phi_ok) nogil:
    cdef int a0, b1, b2, a1
    cdef uint32_t nb, cand, low, outside
    count[0] = 0
    phi_ok[0] = True
    for a0 in range(n):
        nb = adj[a0]
        for b1 in range(n):
            if not (nb >> b1) & 1:
                continue
            for b2 in range(b1 + 1, n):
                if not (nb >> b2) & 1 or not (adj[b1] >> b2) & 1:
                    continue
                cand = nb & ~adj[b1] & ~adj[b2] & ~((<uint32_t> 1) << b1) & ~((<uint32_t> 1) << b2)
                while cand:
                    low = cand & (~cand + 1)
                    a1 = _ctz(low)
                    cand ^= low
                    count[0] += 1
                    outside = ~(((<uint32_t> 1) << a0) | ((<uint32_t> 1) << a1)
                                | ((<uint32_t> 1) << b1) | ((<uint32_t> 1) << b2))
                    if not (adj[a1] & adj[b1] & outside) and not (adj[a1] & adj[b2] & outside):
                        phi_ok[0] = False


cdef bint _viable(const uint32_t* adj, uint32_t full, uint32_t visited, int last) nogil:
    cdef uint32_t free = full & ~visited
    cdef uint32_t ends = ((<uint32_t> 1) << last) | 1
    cdef uint32_t f = free, low, usable
    while f:
        low = f & (~f + 1)
        f ^= low
        usable = adj[_ctz(low)] & (free | ends)
        if (usable & (usable - 1)) == 0:
            return False
    return True


cdef bint _ham(const uint32_t* adj, uint32_t full, uint32_t visited, int last,
               int* path, int depth) nogil:
    cdef uint32_t cand, low, nv
    cdef int v
    if visited == full:
        return adj[last] & 1
    cand = adj[last] & ~visited
    while cand:
        low = cand & (~cand + 1)
        v = _ctz(low)
        cand ^= low
        nv = visited | low
        if nv != full and not _viable(adj, full, nv, v):
            continue
        path[depth] = v
        if _ham(adj, full, nv, v, path, depth + 1):
            return True
    return False


cdef bint _hamilton(const uint32_t* adj, int n, int* path) nogil:
    cdef int v
    if n < 3:
        return False
    for v in range(n):
        if _popcount(adj[v]) < 2:
            return False
    path[0] = 0
    return _ham(adj, _full(n), 1, 0, path, 1)


cdef uint64_t _spectrum(const uint32_t* adj, int n) nogil:
    cdef uint64_t want = 0, found = 0
    cdef int l, s, top, w
    cdef uint32_t allowed, low, nxt
    cdef int stack_v[MAXN + 1]
    cdef uint32_t stack_vis[MAXN + 1]
    cdef uint32_t stack_cand[MAXN + 1]
    for l in range(3, n + 1):
        want |= (<uint64_t> 1) << l
    for s in range(n):
        allowed = _full(n) & ~(((<uint32_t> 1) << s) - 1)
        top = 0
        stack_v[0] = s
        stack_vis[0] = (<uint32_t> 1) << s
        stack_cand[0] = adj[s] & allowed & ~((<uint32_t> 1) << s)
        while top >= 0:
            if stack_cand[top] == 0:
                top -= 1
                continue
            low = stack_cand[top] & (~stack_cand[top] + 1)
            w = _ctz(low)
            stack_cand[top] ^= low
            # path s .. w has top + 2 vertices
            if top >= 1 and (adj[w] >> s) & 1:
                found |= (<uint64_t> 1) << (top + 2)
                if (found & want) == want:
                    return found
            nxt = adj[w] & allowed & ~(stack_vis[top] | low)
            if nxt:
                stack_v[top + 1] = w
                stack_vis[top + 1] = stack_vis[top] | low
                stack_cand[top + 1] = nxt
                top += 1
    return found


cdef int _classify(const uint32_t* adj, int n, uint64_t* spec) nogil:
    cdef int flags = 0
    cdef int claw[4]
    cdef int path[MAXN]
    cdef long count
    cdef bint phi_ok
    spec[0] = 0
    if not _two_connected(adj, n):
        return flags
    flags |= 1
    if _claw(adj, n, claw):
        return flags
    flags |= 2
    _paws(adj, n, &count, &phi_ok)
    if count == 0:
        flags |= 4
    if phi_ok:
        flags |= 8
    if _hamilton(adj, n, path):
        flags |= 16
    spec[0] = _spectrum(adj, n)
    return flags


# ---------------------------------------------------------------- python API

def pair_table(int n):
    return [(i, j) for i in range(n) for j in range(i + 1, n)]


def adjacency_from_code(int n, code):
    cdef uint32_t adj[MAXN]
    if n > MAXN:
        raise ValueError("compiled kernels support at most 32 vertices")
    _from_code(n, <uint64_t> code, adj)
    return [adj[i] for i in range(n)]


def is_connected_mask(adj, int n, removed=0):
    cdef uint32_t a[MAXN]
    _load(adj, n, a)
    return bool(_connected(a, n, <uint32_t> removed))


def is_two_connected_mask(adj, int n):
    cdef uint32_t a[MAXN]
    _load(adj, n, a)
    return bool(_two_connected(a, n))


def find_claw_mask(adj, int n):
    cdef uint32_t a[MAXN]
    cdef int out[4]
    _load(adj, n, a)
    if _claw(a, n, out):
        return (out[0], out[1], out[2], out[3])
    return None


def paw_scan_mask(adj, int n):
    cdef uint32_t a[MAXN]
    cdef long count
    cdef bint ok
    _load(adj, n, a)
    _paws(a, n, &count, &ok)
    return count, bool(ok)


def hamilton_cycle_mask(adj, int n):
    cdef uint32_t a[MAXN]
    cdef int path[MAXN]
    _load(adj, n, a)
    if _hamilton(a, n, path):
        return [path[i] for i in range(n)]
    return None


def cycle_spectrum_mask(adj, int n):
    cdef uint32_t a[MAXN]
    _load(adj, n, a)
    return int(_spectrum(a, n))


def classify_adj(adj, int n):
    cdef uint32_t a[MAXN]
    cdef uint64_t spec
    _load(adj, n, a)
    flags = _classify(a, n, &spec)
    return flags, int(spec)


def classify_code(int n, code):
    cdef uint32_t a[MAXN]
    cdef uint64_t spec
    if n > MAXN:
        raise ValueError("compiled kernels support at most 32 vertices")
    _from_code(n, <uint64_t> code, a)
    flags = _classify(a, n, &spec)
    return flags, int(spec)


def scan_codes(int n, start, stop):
    cdef uint32_t a[MAXN]
    cdef uint64_t spec, code
    cdef uint64_t lo = <uint64_t> start, hi = <uint64_t> stop
    cdef int flags
    codes, flag_list, spectra = [], [], []
    if n > 10:
        raise ValueError("code scans support at most 10 vertices")
    code = lo
    while code < hi:
        _from_code(n, code, a)
        flags = _classify(a, n, &spec)
        if flags & 2:
            codes.append(code)
            flag_list.append(flags)
            spectra.append(spec)
        code += 1
    return codes, flag_list, spectra
