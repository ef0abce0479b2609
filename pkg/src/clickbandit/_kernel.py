"""Numba episode kernel.

Runs a full T-round episode in one compiled loop. The per-round uniforms
are pre-drawn as a (T, 3) array (selection, click, reward) so the kernel
and the step-by-step mech API consume identical randomness; tests replay
kernel traces through the Python API to check agreement.
"""

from __future__ import annotations

import numpy as np
from numba import njit

KIND_UCBS = 0
KIND_UCB = 1
KIND_MU_ORACLE = 2
KIND_MUS_ORACLE = 3
KIND_UNIFORM = 4


@njit(cache=True)
def _sstar(mu, greedy, slope):
    if greedy:
        return 1.0
    v = slope * mu
    return v if v < 1.0 else 1.0


@njit(cache=True)
def episode(kind, horizon, mus, s, greedy, slope, fixed_arm, uniforms):
    k = mus.shape[0]
    r2 = 2.0 * np.log(horizon)

    n = np.zeros(k, dtype=np.int64)
    m = np.zeros(k, dtype=np.int64)
    reward_sum = np.zeros(k, dtype=np.float64)
    active = np.ones(k, dtype=np.bool_)
    n_active = k
    elim_round = np.full(k, -1, dtype=np.int64)

    arm_seq = np.empty(horizon, dtype=np.int64)
    clicked_seq = np.zeros(horizon, dtype=np.bool_)
    reward_seq = np.full(horizon, np.nan, dtype=np.float64)
    active_count = np.empty(horizon, dtype=np.int64)

    for t in range(horizon):
        # -- select
        if kind == KIND_MU_ORACLE or kind == KIND_MUS_ORACLE:
            arm = fixed_arm
        elif kind == KIND_UNIFORM:
            arm = int(uniforms[t, 0] * k)
            if arm >= k:
                arm = k - 1
        else:
            if kind == KIND_UCBS and n_active == 0:
                arm = int(uniforms[t, 0] * k)
                if arm >= k:
                    arm = k - 1
            else:
                arm = -1
                best = -np.inf
                for i in range(k):
                    if kind == KIND_UCBS and not active[i]:
                        continue
                    if m[i] == 0:
                        arm = i
                        break
                    v = reward_sum[i] / m[i] + np.sqrt(r2 / m[i])
                    if v > best:
                        best = v
                        arm = i

        # -- sample
        clicked = uniforms[t, 1] < s[arm]
        n[arm] += 1
        if clicked:
            m[arm] += 1
            rw = 1.0 if uniforms[t, 2] < mus[arm] else 0.0
            reward_sum[arm] += rw
            clicked_seq[t] = True
            reward_seq[t] = rw
        arm_seq[t] = arm

        # -- screening (UCB-S only, just-pulled arm only)
        if kind == KIND_UCBS and active[arm]:
            na = n[arm]
            s_hat = m[arm] / na
            rs = np.sqrt(r2 / na)
            s_lo = s_hat - rs
            s_hi = s_hat + rs
            if m[arm] > 0:
                mu_hat = reward_sum[arm] / m[arm]
                rm = np.sqrt(r2 / m[arm])
                mu_lo = mu_hat - rm
                mu_hi = mu_hat + rm
                if mu_lo < 0.0:
                    mu_lo = 0.0
                elif mu_lo > 1.0:
                    mu_lo = 1.0
                if mu_hi < 0.0:
                    mu_hi = 0.0
                elif mu_hi > 1.0:
                    mu_hi = 1.0
            else:
                mu_lo = 0.0
                mu_hi = 1.0
            if s_hi < _sstar(mu_lo, greedy, slope) or s_lo > _sstar(mu_hi, greedy, slope):
                active[arm] = False
                n_active -= 1
                elim_round[arm] = t

        active_count[t] = n_active

    return arm_seq, clicked_seq, reward_seq, active_count, n, m, reward_sum, elim_round
