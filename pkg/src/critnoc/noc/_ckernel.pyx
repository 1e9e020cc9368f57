# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled NoC fabric. Same semantics and trace as ``_pykernel``."""
from cpython.mem cimport PyMem_Malloc, PyMem_Realloc, PyMem_Free
from libc.string cimport memset
import heapq

DEF NPORTS = 5
DEF PORT_N = 0
DEF PORT_S = 1
DEF PORT_E = 2
DEF PORT_W = 3
DEF PORT_L = 4
DEF NI_PORT = 5
DEF NONCRIT = 4
DEF PROMOTED = -1
DEF NEVER = 0x7FFFFFFFFFFFFFFF

BACKEND = "cython"

ctypedef long long i64


cdef inline int opposite(int p) nogil:
    if p == PORT_N:
        return PORT_S
    if p == PORT_S:
        return PORT_N
    if p == PORT_E:
        return PORT_W
    return PORT_E


cdef void* _alloc(size_t n) except NULL:
    cdef void* p = PyMem_Malloc(n if n > 0 else 1)
    if p == NULL:
        raise MemoryError()
    memset(p, 0, n if n > 0 else 1)
    return p


cdef class NocKernel:
    cdef public int k, n, n_vcs, depth, stages, link, slots
    cdef public bint cfi_priority, priority_enabled, tracing
    cdef public i64 max_wait
    cdef public i64 now, last_move
    cdef public i64 flits_injected, flits_ejected, packets_injected, packets_ejected, queued
    cdef public list trace

    # input VCs, index iv = r*slots + p*V + v
    cdef i64* buf_pid
    cdef int* buf_seq
    cdef i64* buf_arr
    cdef i64* buf_inj
    cdef int* buf_head
    cdef int* buf_cnt
    cdef i64* occ
    cdef char* isrep
    cdef int* hcfi
    cdef int* ctr
    cdef char* passed
    cdef char* hsent
    cdef int* outp
    cdef int* outvc
    cdef i64* vacyc
    cdef i64* waited
    # output VCs, index ov = r*slots + o*V + w
    cdef int* credits
    cdef char* busy
    cdef int* rr_sa
    cdef int* rr_va
    cdef int* buffered
    cdef i64 total_buffered
    # network interfaces, index ns = n*V + v
    cdef list ni_queue
    cdef i64* ni_ready
    cdef i64* ni_occ
    cdef char* ni_isrep
    cdef int* ni_hcfi
    cdef int* ni_ctr
    cdef char* ni_passed
    cdef char* ni_hsent
    cdef i64* ni_waited
    cdef int* ni_credits
    cdef char* ni_busy
    cdef int* ni_next
    cdef int* ni_rr
    cdef public int ni_active
    # packets indexed by id
    cdef i64 pk_cap
    cdef int* pk_src
    cdef int* pk_dst
    cdef int* pk_nfl
    cdef char* pk_rep
    cdef int* pk_cfi
    cdef int* pk_ej
    cdef char* pk_live
    cdef public i64 pending
    # credits returned this cycle, applied at the start of the next
    cdef char* cr_isni
    cdef int* cr_idx
    cdef char* cr_tail
    cdef int cr_cnt, cr_cap
    # ejection FIFO (ring)
    cdef i64* ej_arr
    cdef i64* ej_pid
    cdef int* ej_seq
    cdef i64* ej_inj
    cdef int ej_head, ej_cnt, ej_cap
    # scratch per router
    cdef int* cand_out
    cdef int* va_out

    def __cinit__(self, int k, int n_vcs=3, int depth=4, int router_stages=2,
                  int link_cycles=1, bint cfi_priority=False,
                  bint priority_enabled=True, i64 max_wait=0, bint trace=False):
        if k < 1 or n_vcs < 1 or depth < 1 or router_stages < 1 or link_cycles < 1:
            raise ValueError("invalid NoC parameters")
        self.k = k
        self.n = k * k
        self.n_vcs = n_vcs
        self.depth = depth
        self.stages = router_stages
        self.link = link_cycles
        self.slots = NPORTS * n_vcs
        self.cfi_priority = cfi_priority
        self.priority_enabled = priority_enabled
        self.max_wait = max_wait
        self.tracing = trace
        self.trace = []
        cdef size_t niv = self.n * self.slots
        cdef size_t nni = self.n * n_vcs
        self.buf_pid = <i64*>_alloc(niv * depth * sizeof(i64))
        self.buf_seq = <int*>_alloc(niv * depth * sizeof(int))
        self.buf_arr = <i64*>_alloc(niv * depth * sizeof(i64))
        self.buf_inj = <i64*>_alloc(niv * depth * sizeof(i64))
        self.buf_head = <int*>_alloc(niv * sizeof(int))
        self.buf_cnt = <int*>_alloc(niv * sizeof(int))
        self.occ = <i64*>_alloc(niv * sizeof(i64))
        self.isrep = <char*>_alloc(niv)
        self.hcfi = <int*>_alloc(niv * sizeof(int))
        self.ctr = <int*>_alloc(niv * sizeof(int))
        self.passed = <char*>_alloc(niv)
        self.hsent = <char*>_alloc(niv)
        self.outp = <int*>_alloc(niv * sizeof(int))
        self.outvc = <int*>_alloc(niv * sizeof(int))
        self.vacyc = <i64*>_alloc(niv * sizeof(i64))
        self.waited = <i64*>_alloc(niv * sizeof(i64))
        self.credits = <int*>_alloc(niv * sizeof(int))
        self.busy = <char*>_alloc(niv)
        self.rr_sa = <int*>_alloc(self.n * NPORTS * sizeof(int))
        self.rr_va = <int*>_alloc(self.n * NPORTS * sizeof(int))
        self.buffered = <int*>_alloc(self.n * sizeof(int))
        self.ni_ready = <i64*>_alloc(self.n * sizeof(i64))
        self.ni_occ = <i64*>_alloc(nni * sizeof(i64))
        self.ni_isrep = <char*>_alloc(nni)
        self.ni_hcfi = <int*>_alloc(nni * sizeof(int))
        self.ni_ctr = <int*>_alloc(nni * sizeof(int))
        self.ni_passed = <char*>_alloc(nni)
        self.ni_hsent = <char*>_alloc(nni)
        self.ni_waited = <i64*>_alloc(nni * sizeof(i64))
        self.ni_credits = <int*>_alloc(nni * sizeof(int))
        self.ni_busy = <char*>_alloc(nni)
        self.ni_next = <int*>_alloc(nni * sizeof(int))
        self.ni_rr = <int*>_alloc(self.n * sizeof(int))
        self.cr_cap = <int>(niv + nni + 8)
        self.cr_isni = <char*>_alloc(self.cr_cap)
        self.cr_idx = <int*>_alloc(self.cr_cap * sizeof(int))
        self.cr_tail = <char*>_alloc(self.cr_cap)
        self.ej_cap = self.n * (link_cycles + 2) + 8
        self.ej_arr = <i64*>_alloc(self.ej_cap * sizeof(i64))
        self.ej_pid = <i64*>_alloc(self.ej_cap * sizeof(i64))
        self.ej_seq = <int*>_alloc(self.ej_cap * sizeof(int))
        self.ej_inj = <i64*>_alloc(self.ej_cap * sizeof(i64))
        self.cand_out = <int*>_alloc(self.slots * sizeof(int))
        self.va_out = <int*>_alloc(self.slots * sizeof(int))
        self.pk_cap = 0
        cdef size_t i
        for i in range(niv):
            self.occ[i] = -1
            self.outp[i] = -1
            self.outvc[i] = -1
            self.vacyc[i] = -1
            self.credits[i] = depth
        for i in range(nni):
            self.ni_occ[i] = -1
            self.ni_credits[i] = depth
        for i in range(<size_t>self.n):
            self.ni_ready[i] = NEVER
        self.ni_queue = [[] for _ in range(self.n)]

    def __dealloc__(self):
        PyMem_Free(self.buf_pid)
        PyMem_Free(self.buf_seq)
        PyMem_Free(self.buf_arr)
        PyMem_Free(self.buf_inj)
        PyMem_Free(self.buf_head)
        PyMem_Free(self.buf_cnt)
        PyMem_Free(self.occ)
        PyMem_Free(self.isrep)
        PyMem_Free(self.hcfi)
        PyMem_Free(self.ctr)
        PyMem_Free(self.passed)
        PyMem_Free(self.hsent)
        PyMem_Free(self.outp)
        PyMem_Free(self.outvc)
        PyMem_Free(self.vacyc)
        PyMem_Free(self.waited)
        PyMem_Free(self.credits)
        PyMem_Free(self.busy)
        PyMem_Free(self.rr_sa)
        PyMem_Free(self.rr_va)
        PyMem_Free(self.buffered)
        PyMem_Free(self.ni_ready)
        PyMem_Free(self.ni_occ)
        PyMem_Free(self.ni_isrep)
        PyMem_Free(self.ni_hcfi)
        PyMem_Free(self.ni_ctr)
        PyMem_Free(self.ni_passed)
        PyMem_Free(self.ni_hsent)
        PyMem_Free(self.ni_waited)
        PyMem_Free(self.ni_credits)
        PyMem_Free(self.ni_busy)
        PyMem_Free(self.ni_next)
        PyMem_Free(self.ni_rr)
        PyMem_Free(self.cr_isni)
        PyMem_Free(self.cr_idx)
        PyMem_Free(self.cr_tail)
        PyMem_Free(self.ej_arr)
        PyMem_Free(self.ej_pid)
        PyMem_Free(self.ej_seq)
        PyMem_Free(self.ej_inj)
        PyMem_Free(self.cand_out)
        PyMem_Free(self.va_out)
        PyMem_Free(self.pk_src)
        PyMem_Free(self.pk_dst)
        PyMem_Free(self.pk_nfl)
        PyMem_Free(self.pk_rep)
        PyMem_Free(self.pk_cfi)
        PyMem_Free(self.pk_ej)
        PyMem_Free(self.pk_live)

    # -- host interface -------------------------------------------------
    cdef int _grow(self, i64 need) except -1:
        cdef i64 cap = self.pk_cap if self.pk_cap > 0 else 1024
        while cap <= need:
            cap *= 2
        self.pk_src = <int*>self._realloc(self.pk_src, cap * sizeof(int))
        self.pk_dst = <int*>self._realloc(self.pk_dst, cap * sizeof(int))
        self.pk_nfl = <int*>self._realloc(self.pk_nfl, cap * sizeof(int))
        self.pk_rep = <char*>self._realloc(self.pk_rep, cap)
        self.pk_cfi = <int*>self._realloc(self.pk_cfi, cap * sizeof(int))
        self.pk_ej = <int*>self._realloc(self.pk_ej, cap * sizeof(int))
        cdef char* live = <char*>self._realloc(self.pk_live, cap)
        memset(live + self.pk_cap, 0, cap - self.pk_cap)
        self.pk_live = live
        self.pk_cap = cap
        return 0

    cdef void* _realloc(self, void* p, size_t n) except NULL:
        cdef void* q = PyMem_Realloc(p, n)
        if q == NULL:
            raise MemoryError()
        return q

    def add_packet(self, i64 pid, int src, int dst, int nflits, bint is_reply,
                   int cfi, i64 inject_at):
        if pid < 0:
            raise ValueError("packet ids must be non-negative")
        if pid >= self.pk_cap:
            self._grow(pid)
        if self.pk_live[pid]:
            raise ValueError(f"duplicate packet id {pid}")
        if not (0 <= src < self.n and 0 <= dst < self.n) or nflits < 1:
            raise ValueError("invalid packet")
        self.pk_src[pid] = src
        self.pk_dst[pid] = dst
        self.pk_nfl[pid] = nflits
        self.pk_rep[pid] = is_reply
        self.pk_cfi[pid] = cfi
        self.pk_ej[pid] = 0
        self.pk_live[pid] = 1
        self.pending += 1
        if inject_at < self.now:
            inject_at = self.now
        q = self.ni_queue[src]
        heapq.heappush(q, (inject_at, pid))
        self.ni_ready[src] = q[0][0]
        self.queued += 1

    def take_trace(self):
        out = self.trace
        self.trace = []
        return out

    def run(self, i64 limit):
        cdef i64 nxt
        cdef list events
        while self.now < limit:
            if self._quiet():
                nxt = self._next_injection()
                if nxt >= limit:
                    self.now = limit
                    break
                if nxt > self.now:
                    self.now = nxt
            events = self._step(self.now)
            self.now += 1
            if events:
                return events
        return []

    # -- cycle ----------------------------------------------------------
    cdef bint _quiet(self):
        return (self.cr_cnt == 0 and self.ej_cnt == 0 and self.ni_active == 0
                and self.total_buffered == 0)

    cdef i64 _next_injection(self):
        cdef i64 best = NEVER
        cdef int i
        for i in range(self.n):
            if self.ni_ready[i] < best:
                best = self.ni_ready[i]
        return best

    cdef list _step(self, i64 c):
        cdef int i, idx, node, r
        # credits freed last cycle
        for i in range(self.cr_cnt):
            idx = self.cr_idx[i]
            if self.cr_isni[i]:
                self.ni_credits[idx] += 1
                if self.cr_tail[i]:
                    self.ni_busy[idx] = 0
            else:
                self.credits[idx] += 1
                if self.cr_tail[i]:
                    self.busy[idx] = 0
        self.cr_cnt = 0
        for node in range(self.n):
            if self.ni_ready[node] <= c or self.ni_active:
                self._ni_tick(node, c)
        for r in range(self.n):
            if self.buffered[r]:
                self._router_tick(r, c)
        return self._eject(c)

    cdef inline int _key(self, bint crit, int value, i64 waited):
        if self.max_wait and waited >= self.max_wait:
            return PROMOTED
        if self.priority_enabled and crit:
            return value
        return NONCRIT

    cdef void _bind(self, int iv, i64 pid):
        self.occ[iv] = pid
        self.isrep[iv] = self.pk_rep[pid]
        self.hcfi[iv] = self.pk_cfi[pid]
        self.ctr[iv] = 0
        self.passed[iv] = 0
        self.hsent[iv] = 0
        self.waited[iv] = 0

    cdef int _ni_tick(self, int node, i64 c) except -1:
        cdef int V = self.n_vcs
        cdef int base = node * V
        cdef int v, free, win, seq, ns, iv, pos, ncand, key, best_key, order, best_order
        cdef i64 pid
        cdef bint is_tail, crit
        cdef list q
        if self.ni_ready[node] <= c:
            q = self.ni_queue[node]
            while q and q[0][0] <= c:
                free = -1
                for v in range(V):
                    if not self.ni_busy[base + v]:
                        free = v
                        break
                if free < 0:
                    break
                pid = heapq.heappop(q)[1]
                self.queued -= 1
                ns = base + free
                self.ni_busy[ns] = 1
                self.ni_occ[ns] = pid
                self.ni_isrep[ns] = self.pk_rep[pid]
                self.ni_hcfi[ns] = self.pk_cfi[pid]
                self.ni_ctr[ns] = 0
                self.ni_passed[ns] = 0
                self.ni_hsent[ns] = 0
                self.ni_waited[ns] = 0
                self.ni_next[ns] = 0
                self.ni_active += 1
            self.ni_ready[node] = q[0][0] if q else NEVER
        # injection arbitration among this NI's VCs
        win = -1
        ncand = 0
        best_key = 1 << 30
        best_order = 1 << 30
        for v in range(V):
            ns = base + v
            if self.ni_occ[ns] < 0 or self.ni_credits[ns] <= 0:
                continue
            ncand += 1
            order = (v - self.ni_rr[node]) % V
            if order < 0:
                order += V
            if self.cfi_priority:
                crit = self.ni_isrep[ns] and not self.ni_passed[ns]
                key = self._key(crit, self.ni_ctr[ns] if self.ni_hsent[ns] else self.ni_hcfi[ns],
                                self.ni_waited[ns])
            else:
                key = 0
            if key < best_key or (key == best_key and order < best_order):
                best_key = key
                best_order = order
                win = v
        if win < 0:
            return 0
        self.ni_rr[node] = (win + 1) % V
        if self.tracing:
            for v in range(V):
                ns = base + v
                if self.ni_occ[ns] < 0 or self.ni_credits[ns] <= 0:
                    continue
                self.trace.append((c, "I" if v == win else "C", node, PORT_L, v, NI_PORT,
                                   self.ni_occ[ns], self.ni_next[ns],
                                   self.ni_ctr[ns] if self.ni_hsent[ns] else self.ni_hcfi[ns],
                                   1 if (self.ni_isrep[ns] and not self.ni_passed[ns]) else 0))
        for v in range(V):
            ns = base + v
            if v != win and self.ni_occ[ns] >= 0 and self.ni_credits[ns] > 0:
                self.ni_waited[ns] += 1
        ns = base + win
        self.ni_waited[ns] = 0
        pid = self.ni_occ[ns]
        seq = self.ni_next[ns]
        is_tail = seq == self.pk_nfl[pid] - 1
        iv = node * self.slots + PORT_L * V + win
        if seq == 0:
            self._bind(iv, pid)
        if self.buf_cnt[iv] >= self.depth:
            raise AssertionError("local input buffer overflow")
        pos = (self.buf_head[iv] + self.buf_cnt[iv]) % self.depth
        self.buf_pid[iv * self.depth + pos] = pid
        self.buf_seq[iv * self.depth + pos] = seq
        self.buf_arr[iv * self.depth + pos] = c
        self.buf_inj[iv * self.depth + pos] = c
        self.buf_cnt[iv] += 1
        self.buffered[node] += 1
        self.total_buffered += 1
        self.ni_credits[ns] -= 1
        self.ni_next[ns] = seq + 1
        # counter rule
        if seq == 0:
            self.ni_ctr[ns] = self.ni_hcfi[ns]
            self.ni_hsent[ns] = 1
        elif self.ni_ctr[ns] == 0:
            self.ni_passed[ns] = 1
        else:
            self.ni_ctr[ns] -= 1
        if is_tail:
            self.ni_occ[ns] = -1
            self.ni_isrep[ns] = 0
            self.ni_hcfi[ns] = 0
            self.ni_ctr[ns] = 0
            self.ni_passed[ns] = 0
            self.ni_hsent[ns] = 0
            self.ni_waited[ns] = 0
            self.ni_active -= 1
            self.packets_injected += 1
        self.flits_injected += 1
        self.last_move = c
        return 0

    cdef int _neighbor(self, int r, int p):
        cdef int x = r % self.k
        cdef int y = r / self.k
        if p == PORT_N:
            y -= 1
        elif p == PORT_S:
            y += 1
        elif p == PORT_E:
            x += 1
        elif p == PORT_W:
            x -= 1
        return y * self.k + x

    cdef int _router_tick(self, int r, i64 c) except -1:
        cdef int V = self.n_vcs
        cdef int S = self.slots
        cdef int base = r * S
        cdef int k = self.k
        cdef int x = r % k
        cdef int y = r / k
        cdef int s, iv, o, w, free, start, j, dst, dx, dy, win, key, order, best_key, best_order
        cdef int head_pos, nreq
        cdef i64 arr, t0
        cdef bint crit
        # stage 1: route compute + VC allocation
        nreq = 0
        for s in range(S):
            self.va_out[s] = -1
            iv = base + s
            if self.buf_cnt[iv] == 0 or self.outvc[iv] >= 0:
                continue
            head_pos = iv * self.depth + self.buf_head[iv]
            if self.buf_arr[head_pos] > c:
                continue
            if self.outp[iv] < 0:
                dst = self.pk_dst[self.buf_pid[head_pos]]
                dx = dst % k
                dy = dst / k
                if dx > x:
                    o = PORT_E
                elif dx < x:
                    o = PORT_W
                elif dy > y:
                    o = PORT_S
                elif dy < y:
                    o = PORT_N
                else:
                    o = PORT_L
                self.outp[iv] = o
                if o == PORT_L:
                    self.outvc[iv] = 0
                    self.vacyc[iv] = c
                    continue
            self.va_out[s] = self.outp[iv]
            nreq += 1
        if nreq:
            for o in range(NPORTS):
                start = self.rr_va[r * NPORTS + o]
                for j in range(S):
                    s = (start + j) % S
                    if self.va_out[s] != o:
                        continue
                    free = -1
                    for w in range(V):
                        if not self.busy[base + o * V + w]:
                            free = w
                            break
                    if free < 0:
                        break
                    self.busy[base + o * V + free] = 1
                    iv = base + s
                    self.outvc[iv] = free
                    self.vacyc[iv] = c
                    self.rr_va[r * NPORTS + o] = (s + 1) % S
        # stage 2: switch allocation
        for s in range(S):
            self.cand_out[s] = -1
            iv = base + s
            if self.buf_cnt[iv] == 0 or self.outvc[iv] < 0:
                continue
            arr = self.buf_arr[iv * self.depth + self.buf_head[iv]]
            t0 = arr if arr > self.vacyc[iv] else self.vacyc[iv]
            if c < t0 + self.stages - 1:
                continue
            o = self.outp[iv]
            if o == PORT_L or self.credits[base + o * V + self.outvc[iv]] > 0:
                self.cand_out[s] = o
        for o in range(NPORTS):
            win = -1
            best_key = 1 << 30
            best_order = 1 << 30
            start = self.rr_sa[r * NPORTS + o]
            for s in range(S):
                if self.cand_out[s] != o:
                    continue
                iv = base + s
                order = (s - start) % S
                if order < 0:
                    order += S
                if self.cfi_priority:
                    crit = self.isrep[iv] and not self.passed[iv]
                    key = self._key(crit, self.ctr[iv] if self.hsent[iv] else self.hcfi[iv],
                                    self.waited[iv])
                else:
                    key = 0
                if key < best_key or (key == best_key and order < best_order):
                    best_key = key
                    best_order = order
                    win = s
            if win < 0:
                continue
            self.rr_sa[r * NPORTS + o] = (win + 1) % S
            for s in range(S):
                if self.cand_out[s] != o:
                    continue
                iv = base + s
                if s != win:
                    self.waited[iv] += 1
                if self.tracing:
                    head_pos = iv * self.depth + self.buf_head[iv]
                    self.trace.append((c, "W" if s == win else "C", r, s // V, s % V, o,
                                       self.buf_pid[head_pos], self.buf_seq[head_pos],
                                       self.ctr[iv] if self.hsent[iv] else self.hcfi[iv],
                                       1 if (self.isrep[iv] and not self.passed[iv]) else 0))
            self._depart(r, win, o, c)
        return 0

    cdef int _depart(self, int r, int s, int o, i64 c) except -1:
        cdef int V = self.n_vcs
        cdef int iv = r * self.slots + s
        cdef int p = s / V
        cdef int v = s % V
        cdef int head_pos = iv * self.depth + self.buf_head[iv]
        cdef i64 pid = self.buf_pid[head_pos]
        cdef int seq = self.buf_seq[head_pos]
        cdef i64 inj = self.buf_inj[head_pos]
        cdef bint is_tail = seq == self.pk_nfl[pid] - 1
        cdef int ovc = self.outvc[iv]
        cdef int up, nb, div, pos, e
        cdef i64 arrive
        self.buf_head[iv] = (self.buf_head[iv] + 1) % self.depth
        self.buf_cnt[iv] -= 1
        self.buffered[r] -= 1
        self.total_buffered -= 1
        # credit back upstream, visible next cycle
        e = self.cr_cnt
        self.cr_tail[e] = is_tail
        if p == PORT_L:
            self.cr_isni[e] = 1
            self.cr_idx[e] = r * V + v
        else:
            up = self._neighbor(r, p)
            self.cr_isni[e] = 0
            self.cr_idx[e] = up * self.slots + opposite(p) * V + v
        self.cr_cnt += 1
        self.waited[iv] = 0
        # counter rule
        if seq == 0:
            self.ctr[iv] = self.hcfi[iv]
            self.hsent[iv] = 1
        elif self.ctr[iv] == 0:
            self.passed[iv] = 1
        else:
            self.ctr[iv] -= 1
        if is_tail:
            self.occ[iv] = -1
            self.isrep[iv] = 0
            self.hcfi[iv] = 0
            self.ctr[iv] = 0
            self.passed[iv] = 0
            self.hsent[iv] = 0
            self.outp[iv] = -1
            self.outvc[iv] = -1
            self.vacyc[iv] = -1
            self.waited[iv] = 0
        arrive = c + 1 + self.link
        if o == PORT_L:
            pos = (self.ej_head + self.ej_cnt) % self.ej_cap
            self.ej_arr[pos] = arrive
            self.ej_pid[pos] = pid
            self.ej_seq[pos] = seq
            self.ej_inj[pos] = inj
            self.ej_cnt += 1
            if self.ej_cnt > self.ej_cap:
                raise AssertionError("ejection ring overflow")
        else:
            self.credits[r * self.slots + o * V + ovc] -= 1
            if self.credits[r * self.slots + o * V + ovc] < 0:
                raise AssertionError("credit underflow")
            nb = self._neighbor(r, o)
            div = nb * self.slots + opposite(o) * V + ovc
            if seq == 0:
                if self.occ[div] >= 0 or self.buf_cnt[div]:
                    raise AssertionError("VC allocated twice")
                self._bind(div, pid)
            if self.buf_cnt[div] >= self.depth:
                raise AssertionError("input buffer overflow")
            pos = (self.buf_head[div] + self.buf_cnt[div]) % self.depth
            self.buf_pid[div * self.depth + pos] = pid
            self.buf_seq[div * self.depth + pos] = seq
            self.buf_arr[div * self.depth + pos] = arrive
            self.buf_inj[div * self.depth + pos] = inj
            self.buf_cnt[div] += 1
            self.buffered[nb] += 1
            self.total_buffered += 1
        self.last_move = c
        return 0

    cdef list _eject(self, i64 c):
        cdef list out = []
        cdef i64 pid
        cdef int seq
        while self.ej_cnt and self.ej_arr[self.ej_head] == c:
            pid = self.ej_pid[self.ej_head]
            seq = self.ej_seq[self.ej_head]
            out.append((c, pid, seq, self.ej_inj[self.ej_head]))
            self.ej_head = (self.ej_head + 1) % self.ej_cap
            self.ej_cnt -= 1
            self.pk_ej[pid] += 1
            if self.pk_ej[pid] != seq + 1:
                raise AssertionError("flits ejected out of order")
            if self.tracing:
                self.trace.append((c, "E", self.pk_dst[pid], PORT_L, -1, -1, pid, seq, 0, 0))
            if self.pk_ej[pid] == self.pk_nfl[pid]:
                self.pk_live[pid] = 0
                self.pending -= 1
                self.packets_ejected += 1
            self.flits_ejected += 1
        if out:
            self.last_move = c
        return out

    def check_invariants(self):
        cdef int iv, i, pos, prev
        for iv in range(self.n * self.slots):
            if self.buf_cnt[iv] > self.depth:
                raise AssertionError("buffer overflow")
            prev = -1
            for i in range(self.buf_cnt[iv]):
                pos = iv * self.depth + (self.buf_head[iv] + i) % self.depth
                if self.buf_pid[pos] != self.occ[iv]:
                    raise AssertionError("two packets share a VC buffer")
                if self.buf_seq[pos] <= prev:
                    raise AssertionError("flits out of order in a VC buffer")
                prev = self.buf_seq[pos]
            if self.ctr[iv] < 0:
                raise AssertionError("negative CFI counter")
        if self.flits_injected < self.flits_ejected:
            raise AssertionError("more flits ejected than injected")
