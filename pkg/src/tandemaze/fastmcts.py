"""Numba-compiled twin of the reference tree search.

Consumes the exact same precomputed tables and the same splitmix64
stream as mcts.reference_search, drawing in the same order, so the two
produce bit-identical trees; an equivalence test enforces this. Flat
preallocated node arrays instead of objects -- one expansion per
iteration bounds the tree at iterations + 1 nodes.
"""

import math

import numpy as np
from numba import njit

from .game import Action, GridPos
from .mcts import ChildStat, SearchResult, SearchTables

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_INV_2_53 = 2.0 ** -53


@njit(cache=True)
def _rng_next(state):
    state = state + _GOLDEN
    z = state
    z = (z ^ (z >> np.uint64(30))) * _MIX1
    z = (z ^ (z >> np.uint64(27))) * _MIX2
    z = z ^ (z >> np.uint64(31))
    return state, (z >> np.uint64(11)) * _INV_2_53


@njit(cache=True)
def _search_kernel(root_cell, goal, ego_next, ego_acts, ego_cnt, opt_next, feas, bonus,
                   iterations, k, gamma, horizon, seed, gamma_pow, logs):
    cap = iterations + 1
    n_cell = np.empty(cap, np.int64)
    n_ctrl = np.empty(cap, np.int64)
    n_feas = np.empty(cap, np.float64)
    n_rew = np.empty(cap, np.float64)
    n_vis = np.zeros(cap, np.int64)
    n_tot = np.zeros(cap, np.float64)
    n_par = np.empty(cap, np.int64)
    n_act = np.empty(cap, np.int64)
    first_child = np.full(cap, -1, np.int64)
    last_child = np.full(cap, -1, np.int64)
    next_sib = np.full(cap, -1, np.int64)
    acts = np.empty(cap * 5, np.int64)
    acnt = np.zeros(cap, np.int64)
    acur = np.zeros(cap, np.int64)

    n_cell[0] = root_cell
    n_ctrl[0] = 0
    n_feas[0] = 1.0
    n_rew[0] = 0.0
    n_par[0] = -1
    n_act[0] = -1
    cnt = ego_cnt[root_cell]
    for j in range(cnt):
        acts[j] = ego_acts[root_cell * 5 + j]
    acnt[0] = cnt
    size = 1

    state = seed
    for _ in range(iterations):
        v = 0
        while n_cell[v] != goal:
            if acur[v] < acnt[v]:
                a = acts[v * 5 + acur[v]]
                acur[v] += 1
                if a == 4:
                    ccell = n_cell[v]
                    cctrl = 1 - n_ctrl[v]
                    cf = 1.0
                    cr = -1.0
                else:
                    cctrl = n_ctrl[v]
                    if cctrl == 0:
                        ccell = ego_next[n_cell[v] * 4 + a]
                        cf = 1.0
                    else:
                        ccell = opt_next[n_cell[v] * 4 + a]
                        cf = feas[n_cell[v] * 4 + a]
                    cr = 100.0 if ccell == goal else -1.0
                    if cctrl == 0:
                        cr += bonus[ccell]
                w = size
                size += 1
                n_cell[w] = ccell
                n_ctrl[w] = cctrl
                n_feas[w] = cf
                n_rew[w] = cr
                n_par[w] = v
                n_act[w] = a
                ccnt = 0
                if ccell != goal:
                    if cctrl == 0:
                        ccnt = ego_cnt[ccell]
                        for j in range(ccnt):
                            acts[w * 5 + j] = ego_acts[ccell * 5 + j]
                    else:
                        ccnt = 5
                        for j in range(5):
                            acts[w * 5 + j] = j
                acnt[w] = ccnt
                if first_child[v] < 0:
                    first_child[v] = w
                else:
                    next_sib[last_child[v]] = w
                last_child[v] = w
                v = w
                break
            log_n = logs[n_vis[v]]
            best = -1
            best_u = -np.inf
            c = first_child[v]
            while c >= 0:
                u = n_tot[c] / n_vis[c] + k * math.sqrt(log_n / n_vis[c])
                if u > best_u:
                    best_u = u
                    best = c
                c = next_sib[c]
            v = best

        q = 0.0
        if n_cell[v] != goal:
            cell = n_cell[v]
            ctrl = n_ctrl[v]
            d = 0
            while d < horizon and cell != goal:
                if ctrl == 0:
                    state, x = _rng_next(state)
                    a = ego_acts[cell * 5 + int(x * ego_cnt[cell])]
                else:
                    state, x = _rng_next(state)
                    a = int(x * 5)
                if a == 4:
                    ctrl = 1 - ctrl
                elif ctrl == 0:
                    cell = ego_next[cell * 4 + a]
                else:
                    state, x = _rng_next(state)
                    if x < feas[cell * 4 + a]:
                        cell = opt_next[cell * 4 + a]
                r = 100.0 if cell == goal else -1.0
                if ctrl == 0:
                    r += bonus[cell]
                q += gamma_pow[d] * r
                d += 1

        f = 1.0
        nd = v
        while nd >= 0:
            w2 = n_tot[nd] / n_vis[nd] if n_vis[nd] > 0 else 0.0
            q = n_rew[nd] + gamma * (f * q + (1.0 - f) * w2)
            n_tot[nd] += q
            n_vis[nd] += 1
            f = n_feas[nd]
            nd = n_par[nd]

    out_act = np.empty(5, np.int64)
    out_cell = np.empty(5, np.int64)
    out_vis = np.empty(5, np.int64)
    out_tot = np.empty(5, np.float64)
    out_feas = np.empty(5, np.float64)
    n_children = 0
    best = -1
    best_n = np.int64(-1)
    c = first_child[0]
    while c >= 0:
        out_act[n_children] = n_act[c]
        out_cell[n_children] = n_cell[c]
        out_vis[n_children] = n_vis[c]
        out_tot[n_children] = n_tot[c]
        out_feas[n_children] = n_feas[c]
        if n_vis[c] > best_n:
            best_n = n_vis[c]
            best = n_act[c]
        n_children += 1
        c = next_sib[c]
    return best, n_children, out_act, out_cell, out_vis, out_tot, out_feas, n_vis[0]


def fast_search(tables: SearchTables, root_cell: int) -> SearchResult:
    """Run the kernel and repackage its stats like the reference search."""
    best, n_children, act, cell, vis, tot, fs, root_vis = _search_kernel(
        root_cell,
        tables.goal_idx,
        tables.ego_next,
        tables.ego_acts,
        tables.ego_cnt,
        tables.opt_next,
        tables.feas,
        tables.bonus,
        tables.iterations,
        tables.exploration,
        tables.discount,
        tables.horizon,
        np.uint64(tables.rng_seed & ((1 << 64) - 1)),
        tables.gamma_pow,
        tables.logs,
    )
    children = tuple(
        ChildStat(
            action=Action(int(act[i])),
            cell=GridPos(int(cell[i]) % tables.width, int(cell[i]) // tables.width),
            visits=int(vis[i]),
            total_return=float(tot[i]),
            feasibility=float(fs[i]),
        )
        for i in range(n_children)
    )
    return SearchResult(action=Action(int(best)), children=children, root_visits=int(root_vis))


def warmup() -> None:
    """Trigger JIT compilation once (e.g. in a parent before forking workers)."""
    from .belief import init_belief
    from .game import MazeSide
    from .mcts import PlannerParams, build_tables

    side = MazeSide(2, 2)
    tables = build_tables(side, init_belief(2, 2), (), GridPos(1, 1), PlannerParams(iterations=2, horizon=2))
    fast_search(tables, 0)
