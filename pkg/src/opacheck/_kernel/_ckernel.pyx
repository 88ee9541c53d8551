# cython: language_level=3, boundscheck=False, wraparound=False, initializedcheck=False
# distutils: language = c++
"""Compiled mirrors of the pure-Python search kernels.

Must match pykernel.py result-for-result: same visit order, same counters,
same exceptions. Estimates live in multi-word bitsets; interning happens once
per distinct estimate, so the hot loops never touch Python objects.
"""

from cpython.bytes cimport PyBytes_FromStringAndSize
from libc.string cimport memcpy
from libcpp.vector cimport vector

from opacheck.errors import StateSpaceLimitError

ctypedef unsigned long long u64
ctypedef long long i64

cdef extern from *:
    int __builtin_ctzll(unsigned long long) nogil

name = "compiled"


cdef inline int _fill_words(object mask, u64* out, int W) except -1:
    cdef bytes bts = mask.to_bytes(W * 8, "little")
    cdef const unsigned char* p = bts
    memcpy(out, p, W * 8)
    return 0


cdef inline object _words_to_int(u64* words, int W):
    cdef bytes bts = PyBytes_FromStringAndSize(<char*>words, W * 8)
    return int.from_bytes(bts, "little")


cdef class _ZSpace:
    """Interned estimates plus per-event successor rows, computed on demand."""

    cdef int n, ne, W
    cdef vector[u64] G        # gamma, flattened: [(e*n+q)*W + w]
    cdef vector[u64] zwords   # zid*W
    cdef vector[i64] zrows    # zid*ne; -1 = uncomputed
    cdef vector[char] zzero   # zid -> estimate is empty
    cdef vector[u64] visited  # zid*W bit rows over left states
    cdef vector[u64] tmp      # scratch, W words
    cdef dict zindex

    def __cinit__(self, int n, list gamma):
        self.n = n
        self.ne = len(gamma)
        self.W = (n + 63) // 64
        if self.W == 0:
            self.W = 1
        self.zindex = {}
        self.tmp.resize(self.W)
        self.G.resize(<size_t>self.ne * (n if n else 1) * self.W)
        cdef int e, q
        cdef list row
        for e in range(self.ne):
            row = gamma[e]
            for q in range(n):
                _fill_words(row[q], &self.G[(<size_t>e * n + q) * self.W], self.W)

    cdef i64 nz(self):
        return <i64>(self.zzero.size())

    cdef i64 intern_from_tmp(self):
        cdef bytes key = PyBytes_FromStringAndSize(<char*>&self.tmp[0], self.W * 8)
        v = self.zindex.get(key)
        if v is not None:
            return <i64>v
        cdef i64 zi = self.nz()
        self.zindex[key] = zi
        cdef int w
        cdef char zz = 1
        for w in range(self.W):
            self.zwords.push_back(self.tmp[w])
            if self.tmp[w]:
                zz = 0
        cdef int e
        for e in range(self.ne):
            self.zrows.push_back(-1)
        self.zzero.push_back(zz)
        for w in range(self.W):
            self.visited.push_back(0)
        return zi

    cdef i64 intern_mask(self, object mask) except -1:
        _fill_words(mask, &self.tmp[0], self.W)
        return self.intern_from_tmp()

    cdef void compute_row(self, i64 zi):
        cdef int e, w, w2
        cdef i64 base = zi * self.W
        cdef i64 q, goff
        cdef u64 word
        for e in range(self.ne):
            for w in range(self.W):
                self.tmp[w] = 0
            for w in range(self.W):
                word = self.zwords[base + w]
                while word:
                    q = (<i64>w << 6) + __builtin_ctzll(word)
                    word &= word - 1
                    goff = (<i64>e * self.n + q) * self.W
                    for w2 in range(self.W):
                        self.tmp[w2] |= self.G[goff + w2]
            self.zrows[zi * self.ne + e] = self.intern_from_tmp()

    cdef bint mark(self, i64 q, i64 zi):
        cdef i64 off = zi * self.W + (q >> 6)
        cdef u64 bit = (<u64>1) << (q & 63)
        if self.visited[off] & bit:
            return False
        self.visited[off] = self.visited[off] | bit
        return True

    cdef object mask_of(self, i64 zi):
        return _words_to_int(&self.zwords[zi * self.W], self.W)


def observer_reach(int n, list gamma, object init_mask, object cap):
    cdef _ZSpace zs = _ZSpace(n, gamma)
    cdef i64 capv = cap
    cdef i64 zi = zs.intern_mask(init_mask)
    masks = [init_mask]
    trans = []
    cdef i64 pos = 0, zj
    cdef int e
    cdef list row
    while pos < <i64>len(masks):
        zi = pos
        pos += 1
        if zs.ne:
            zs.compute_row(zi)
        row = []
        for e in range(zs.ne):
            zj = zs.zrows[zi * zs.ne + e]
            if zj >= <i64>len(masks):
                if zj >= capv:
                    raise StateSpaceLimitError(
                        f"observer exceeds cap of {cap} states; raise the cap if intended"
                    )
                masks.append(zs.mask_of(zj))
            row.append(zj)
        trans.append(row)
    return masks, trans


def product_bfs(int n, list gamma, list roots, object k_cap, object cap):
    cdef _ZSpace zs = _ZSpace(n, gamma)
    cdef i64 kcap = k_cap
    cdef i64 capv = cap
    cdef vector[i64] cur, nxt
    cdef i64 nvis = 0, expansions = 0, level = 0
    cdef i64 q, zi, zi2, q2, node, goff
    cdef int e, w
    cdef size_t idx
    cdef u64 word
    cdef bint viol, any_succ

    for obj in roots:
        q = obj[0]
        zi = zs.intern_mask(obj[1])
        if zs.mark(q, zi):
            nvis += 1
            if nvis > capv:
                raise StateSpaceLimitError(
                    f"product exceeds cap of {cap} states; raise the cap if intended"
                )
            cur.push_back(zi * n + q)
    for idx in range(cur.size()):
        node = cur[idx]
        if zs.zzero[node // n]:
            return True, 0, 0, nvis

    while cur.size() > 0 and level < kcap:
        nxt.clear()
        for idx in range(cur.size()):
            node = cur[idx]
            zi = node // n
            q = node % n
            expansions += 1
            if zs.ne and zs.zrows[zi * zs.ne] == -1:
                zs.compute_row(zi)
            for e in range(zs.ne):
                goff = (<i64>e * n + q) * zs.W
                zi2 = zs.zrows[zi * zs.ne + e]
                viol = zs.zzero[zi2]
                for w in range(zs.W):
                    word = zs.G[goff + w]
                    while word:
                        q2 = (<i64>w << 6) + __builtin_ctzll(word)
                        word &= word - 1
                        if zs.mark(q2, zi2):
                            nvis += 1
                            if nvis > capv:
                                raise StateSpaceLimitError(
                                    f"product exceeds cap of {cap} states; "
                                    f"raise the cap if intended"
                                )
                            if viol:
                                return True, expansions, level + 1, nvis
                            nxt.push_back(zi2 * n + q2)
        level += 1
        cur.swap(nxt)
    return False, expansions, level, nvis
