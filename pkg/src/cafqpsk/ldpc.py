"""Regular LDPC codes: construction, systematic encoding, log-domain
sum-product BP decoding, a brute-force degraded-channel ML decoder for tiny
codes, and alist import/export.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .channels import degraded_pdf
from .model import ChannelParams

_TANH_CLIP = 1.0 - 1e-15
_T_MIN = 1e-30


class ConstructionError(Exception):
    pass


@dataclass
class LdpcCode:
    """Sparse regular parity-check code with encoder preprocessing.

    Edges are stored twice-sorted: `edge_var`/`edge_check` sorted by check
    (for the check update), with `var_order` giving the per-variable view.
    """

    n: int
    m: int
    dv: int
    dc: int
    edge_var: np.ndarray    # len E, sorted by check index
    edge_check: np.ndarray  # len E, non-decreasing
    pivot_cols: np.ndarray
    free_cols: np.ndarray
    parity_map: np.ndarray  # rank x k dense 0/1; parities = parity_map @ msg mod 2

    check_slices: np.ndarray = field(init=False)
    var_order: np.ndarray = field(init=False)
    var_slices: np.ndarray = field(init=False)

    def __post_init__(self):
        e = len(self.edge_var)
        self.check_slices = np.searchsorted(self.edge_check, np.arange(self.m + 1))
        self.var_order = np.argsort(self.edge_var, kind="stable")
        self.var_slices = np.searchsorted(self.edge_var[self.var_order],
                                          np.arange(self.n + 1))
        assert e == self.n * self.dv == self.m * self.dc

    @property
    def k(self) -> int:
        return self.n - len(self.pivot_cols)

    @property
    def design_rate(self) -> float:
        return 1.0 - self.dv / self.dc

    def syndrome(self, bits: np.ndarray) -> np.ndarray:
        acc = np.zeros(self.m, dtype=np.int64)
        np.add.at(acc, self.edge_check, bits[self.edge_var].astype(np.int64))
        return (acc & 1).astype(np.uint8)

    def is_codeword(self, bits: np.ndarray) -> bool:
        return not self.syndrome(bits).any()


@dataclass
class BpResult:
    hard_bits: np.ndarray
    converged: bool
    iterations_used: int
    final_llrs: np.ndarray


def _count_4cycles(n: int, edge_var: np.ndarray, edge_check: np.ndarray, m: int):
    """Count multi-edges and check pairs sharing >= 2 variables."""
    from scipy.sparse import csr_matrix

    data = np.ones(len(edge_var), dtype=np.int32)
    h = csr_matrix((data, (edge_check, edge_var)), shape=(m, n))
    h.sum_duplicates()
    multi = int((h.data > 1).sum())
    h01 = (h > 0).astype(np.int32)
    overlap = (h01 @ h01.T).tocoo()
    bad = sum(1 for r, c, v in zip(overlap.row, overlap.col, overlap.data)
              if r < c and v >= 2)
    return multi, bad


def _swap_repair(n: int, m: int, edge_var: np.ndarray, edge_check: np.ndarray,
                 score: int, rng: np.random.Generator, max_steps: int = 5000):
    """Hill-climb variable-endpoint swaps that reduce the 4-cycle count.

    Only triggered for small codes whose pair demand sits close to the
    counting bound; returns the best arrangement found (possibly still
    containing short cycles if the packing is not reachable).
    """
    edge_var = edge_var.copy()
    e = len(edge_var)
    for _ in range(max_steps):
        if score == 0:
            break
        i, j = rng.integers(0, e, size=2)
        if edge_var[i] == edge_var[j] or edge_check[i] == edge_check[j]:
            continue
        edge_var[i], edge_var[j] = edge_var[j], edge_var[i]
        multi, bad = _count_4cycles(n, edge_var, edge_check, m)
        if multi == 0 and bad <= score:
            score = bad
        else:
            edge_var[i], edge_var[j] = edge_var[j], edge_var[i]
    return edge_var, edge_check


def _greedy_edges(n: int, dv: int, dc: int, m: int, avoid_cycles: bool,
                  rng: np.random.Generator):
    """Progressive greedy edge placement, one variable at a time."""
    caps = np.full(m, dc, dtype=np.int64)
    check_vars: list[set[int]] = [set() for _ in range(m)]
    var_checks: list[list[int]] = [[] for _ in range(n)]
    order = rng.permutation(n)
    violations = 0
    for v in order:
        chosen: list[int] = []
        for _ in range(dv):
            blocked: set[int] = set(chosen)
            if avoid_cycles:
                for c2 in chosen:
                    for u in check_vars[c2]:
                        blocked.update(var_checks[u])
            score = caps.astype(float)
            if blocked:
                score[list(blocked)] = -1
            best = score.max()
            if best <= 0:
                # tolerate a short cycle rather than dead-end
                score = caps.astype(float)
                score[chosen] = -1
                best = score.max()
                violations += 1
            cands = np.flatnonzero(score == best)
            c = int(cands[rng.integers(0, len(cands))])
            chosen.append(c)
            caps[c] -= 1
            check_vars[c].add(int(v))
            var_checks[v].append(c)
    edge_var = np.array([v for v in range(n) for _ in var_checks[v]])
    edge_check = np.array([c for v in range(n) for c in var_checks[v]])
    return edge_var, edge_check, violations


def construct_regular(n: int, dv: int, dc: int, seed: int,
                      max_restarts: int = 20) -> LdpcCode:
    """(dv, dc)-regular code by greedy cycle-avoiding edge placement.

    Girth >= 6 is enforced whenever the pair-counting bound
    n dv (dv-1) <= m (m-1) allows it (dense toy codes cannot avoid
    4-cycles); multi-edges are never allowed. Deterministic per seed.
    """
    if n * dv % dc != 0 or n < dc or dv < 1 or dc < 2:
        raise ConstructionError(f"infeasible degrees n={n}, dv={dv}, dc={dc}")
    m = n * dv // dc
    girth_feasible = n * dv * (dv - 1) <= m * (m - 1)
    rng = np.random.default_rng(seed)
    best = None
    for _ in range(max_restarts):
        edge_var, edge_check, _ = _greedy_edges(n, dv, dc, m, girth_feasible, rng)
        multi, bad = _count_4cycles(n, edge_var, edge_check, m)
        if multi == 0 and (bad == 0 or not girth_feasible):
            best = (0, edge_var, edge_check)
            break
        if multi == 0 and (best is None or bad < best[0]):
            best = (bad, edge_var, edge_check)
    if best is None:
        raise ConstructionError(
            f"construction failed after {max_restarts} restarts: "
            f"multi-edges could not be avoided for n={n}, dv={dv}, dc={dc}")
    bad, edge_var, edge_check = best
    if bad:
        # tight pair packings near the counting bound: hill-climb on swaps
        edge_var, edge_check = _swap_repair(n, m, edge_var, edge_check, bad, rng)

    order = np.argsort(edge_check, kind="stable")
    edge_var = edge_var[order]
    edge_check = edge_check[order]
    pivot_cols, free_cols, parity_map = _encoder_prep(n, m, edge_var, edge_check)
    return LdpcCode(n, m, dv, dc, edge_var, edge_check,
                    pivot_cols, free_cols, parity_map)


def _encoder_prep(n: int, m: int, edge_var: np.ndarray, edge_check: np.ndarray):
    """GF(2) row reduction of H packed into uint64 words."""
    words = (n + 63) // 64
    rows = np.zeros((m, words), dtype=np.uint64)
    for c, v in zip(edge_check, edge_var):
        rows[c, v // 64] ^= np.uint64(1) << np.uint64(v % 64)

    pivot_cols = []
    r = 0
    for col in range(n):
        w, b = col // 64, np.uint64(col % 64)
        mask = (rows[:, w] >> b) & np.uint64(1)
        cand = np.flatnonzero(mask[r:])
        if len(cand) == 0:
            continue
        pr = r + cand[0]
        if pr != r:
            rows[[r, pr]] = rows[[pr, r]]
        hit = np.flatnonzero((rows[:, w] >> b) & np.uint64(1))
        hit = hit[hit != r]
        rows[hit] ^= rows[r]
        pivot_cols.append(col)
        r += 1
        if r == m:
            break
    rank = r
    pivot_cols = np.array(pivot_cols, dtype=np.int64)
    free_cols = np.setdiff1d(np.arange(n), pivot_cols)
    # dense rank x k map from free columns to pivot values
    bits = np.unpackbits(rows[:rank].view(np.uint8), bitorder="little", axis=1)[:, :n]
    parity_map = bits[:, free_cols].astype(np.uint8)
    return pivot_cols, free_cols, parity_map


def encode(code: LdpcCode, message: np.ndarray) -> np.ndarray:
    """Systematic encoding: message occupies the free columns."""
    message = np.asarray(message, dtype=np.uint8)
    if message.shape != (code.k,):
        raise ValueError(f"message length must be {code.k}, got {message.shape}")
    x = np.zeros(code.n, dtype=np.uint8)
    x[code.free_cols] = message
    if len(code.pivot_cols):
        x[code.pivot_cols] = (code.parity_map @ message.astype(np.int64)) & 1
    return x


def bp_decode(code: LdpcCode, channel_llrs: np.ndarray, max_iter: int) -> BpResult:
    """Flooding-schedule log-domain sum-product decoding.

    Syndrome is checked after each iteration; max_iter = 0 returns the hard
    decision of the channel LLRs without any convergence claim. Ties at LLR
    zero decide bit 0.
    """
    llr = np.asarray(channel_llrs, dtype=float)
    if llr.shape != (code.n,):
        raise ValueError("LLR length mismatch")
    if max_iter == 0:
        hard = (llr < 0).astype(np.uint8)
        return BpResult(hard, False, 0, llr.copy())

    ev, eo = code.edge_var, code.var_order
    cs, vs = code.check_slices, code.var_slices
    v2c = llr[ev].copy()
    c2v = np.zeros_like(v2c)
    for it in range(1, max_iter + 1):
        t = np.tanh(0.5 * v2c)
        t = np.clip(t, -_TANH_CLIP, _TANH_CLIP)
        t = np.where(np.abs(t) < _T_MIN, np.where(t < 0, -_T_MIN, _T_MIN), t)
        logs = np.log(np.abs(t))
        signs = np.signbit(t).astype(np.int64)
        sum_logs = np.add.reduceat(logs, cs[:-1])
        sum_signs = np.add.reduceat(signs, cs[:-1])
        ex_log = np.repeat(sum_logs, code.dc) - logs
        ex_sign = 1 - 2 * ((np.repeat(sum_signs, code.dc) - signs) & 1)
        prod = ex_sign * np.exp(ex_log)
        c2v = 2.0 * np.arctanh(np.clip(prod, -_TANH_CLIP, _TANH_CLIP))

        sums = np.add.reduceat(c2v[eo], vs[:-1])
        total = llr + sums
        v2c = total[ev] - c2v
        hard = (total < 0).astype(np.uint8)
        if code.is_codeword(hard):
            return BpResult(hard, True, it, total)
    return BpResult(hard, False, max_iter, total)


def ml_decode_degraded(code: LdpcCode, received: np.ndarray,
                       p: ChannelParams) -> np.ndarray:
    """Exhaustive maximizer of the degraded-channel likelihood over the code.

    Blocklength is capped at 24 (2^k codeword enumeration). Ties break
    toward the lexicographically smallest codeword.
    """
    if code.n > 24:
        raise ValueError("blocklength too large for exhaustive decoding")
    received = np.asarray(received, dtype=float)
    ll0 = degraded_pdf(0, p).logpdf(received)
    ll1 = degraded_pdf(1, p).logpdf(received)
    best_score = -np.inf
    best = None
    for idx in range(2 ** code.k):
        msg = np.array([(idx >> i) & 1 for i in range(code.k)], dtype=np.uint8)
        cw = encode(code, msg)
        score = float(np.where(cw == 0, ll0, ll1).sum())
        if score > best_score + 1e-12 or (
                abs(score - best_score) <= 1e-12
                and best is not None and _lex_less(cw, best)):
            best_score = score
            best = cw
    return best


def _lex_less(a: np.ndarray, b: np.ndarray) -> bool:
    diff = np.flatnonzero(a != b)
    return len(diff) > 0 and a[diff[0]] < b[diff[0]]


def to_alist(code: LdpcCode) -> str:
    """Serialize the parity-check matrix in standard alist text form."""
    var_nb = [[] for _ in range(code.n)]
    chk_nb = [[] for _ in range(code.m)]
    for v, c in zip(code.edge_var, code.edge_check):
        var_nb[v].append(c + 1)
        chk_nb[c].append(v + 1)
    lines = [f"{code.n} {code.m}",
             f"{code.dv} {code.dc}",
             " ".join(str(len(x)) for x in var_nb),
             " ".join(str(len(x)) for x in chk_nb)]
    lines += [" ".join(map(str, sorted(x))) for x in var_nb]
    lines += [" ".join(map(str, sorted(x))) for x in chk_nb]
    return "\n".join(lines) + "\n"


def from_alist(text: str) -> LdpcCode:
    """Parse an alist file describing a regular code."""
    tok = text.split()
    it = iter(tok)
    n, m = int(next(it)), int(next(it))
    dv, dc = int(next(it)), int(next(it))
    vdeg = [int(next(it)) for _ in range(n)]
    cdeg = [int(next(it)) for _ in range(m)]
    if any(d != dv for d in vdeg) or any(d != dc for d in cdeg):
        raise ValueError("alist does not describe a regular code")
    edge_var, edge_check = [], []
    for v in range(n):
        for _ in range(dv):
            edge_check.append(int(next(it)) - 1)
            edge_var.append(v)
    edge_var = np.array(edge_var)
    edge_check = np.array(edge_check)
    order = np.argsort(edge_check, kind="stable")
    edge_var, edge_check = edge_var[order], edge_check[order]
    pivot_cols, free_cols, parity_map = _encoder_prep(n, m, edge_var, edge_check)
    return LdpcCode(n, m, dv, dc, edge_var, edge_check,
                    pivot_cols, free_cols, parity_map)
