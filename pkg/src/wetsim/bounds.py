"""Closed-form bound calculators: the halfplane shatter function, the
Komlos-Pach-Woeginger epsilon-net failure bound, the explicit upper-bound
slack eps_d(n), the drop-sequence ledger and the envelope curves
1/4 w(1/n) <= E[1 - mu(P_n)] <= w((d+2) ln n / n) + eps_d(n) / n.

Drop-sequence quantities such as s_i = 4 * 2**(-2**i) are held as ExactLog2,
so nothing underflows before the final float conversion.
"""
from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .exactlog import ExactLog2
from .measures import DropSequence, Measure, drop_p, drop_s
from .wetpart import drop_wet_measure, wet_measure

__all__ = [
    "ExactLog2", "shatter_halfplanes", "kpw_failure_log_bound", "kpw_failure_bound",
    "theorem2_epsilon", "failure_closed_form", "kpw_simplification_n0", "drop_n",
    "LedgerRow", "theorem3_ledger", "f0_threshold", "arccos_inequality_check",
    "EnvelopeRow", "BoundReport", "theorem2_envelopes",
]

_SQRT2 = math.sqrt(2.0)


def shatter_halfplanes(N: int, d: int) -> int:
    """Harding's bound 2 * sum_{i<=d} C(N-1, i) on the number of halfspace dichotomies."""
    if N < 1 or d < 1:
        raise ValueError("need N >= 1 and d >= 1")
    return 2 * sum(math.comb(N - 1, i) for i in range(d + 1))


def kpw_failure_log_bound(N: int, s: int, eps: float, d: int = 2) -> float:
    """Natural log of 2 pi_H(N) (1 - s/N)**((N - s) eps - 1)."""
    if not N > s >= 1:
        raise ValueError("need N > s >= 1")
    if not 0.0 < eps < 1.0:
        raise ValueError("eps must lie in (0, 1)")
    expo = (N - s) * eps - 1.0
    return math.log(2) + math.log(shatter_halfplanes(N, d)) + expo * math.log1p(-s / N)


def kpw_failure_bound(N: int, s: int, eps: float, d: int = 2) -> float:
    """Probability bound that s samples miss being an eps-net; not clamped to 1."""
    lg = kpw_failure_log_bound(N, s, eps, d)
    return math.exp(lg) if lg < 709.0 else math.inf


def theorem2_epsilon(n: int, d: int = 2) -> float:
    """eps_d(n) = 2**(d+3) e ceil(ln n)**d / n, the slack in the upper envelope."""
    if n < 2 or d < 2:
        raise ValueError("need n >= 2 and d >= 2")
    return 2.0 ** (d + 3) * math.e * math.ceil(math.log(n)) ** d / n


def failure_closed_form(n: int, d: int = 2, delta: float | None = None) -> float:
    """2**(delta+1) e n**(d-delta) ceil(ln n)**d; with delta = d + 2 this is eps_d(n) / n."""
    delta = d + 2 if delta is None else delta
    return 2.0 ** (delta + 1) * math.e * float(n) ** (d - delta) * math.ceil(math.log(n)) ** d


def _net_params(n: int, delta: float):
    N = n * math.ceil(math.log(n))
    eps = delta * math.log(n) / n
    return N, eps


def _simplification_holds(n: int, d: int, delta: float) -> bool:
    N, eps = _net_params(n, delta)
    if not (N > n and eps < 1.0 and (N - n) * eps - 1.0 >= 0.0):
        return False
    return kpw_failure_log_bound(N, n, eps, d) <= math.log(failure_closed_form(n, d, delta))


@functools.lru_cache(maxsize=None)
def kpw_simplification_n0(d: int = 2, delta: float | None = None, n_max: int = 20000) -> int:
    """Smallest n0 such that every n in [n0, n_max] has (N - n) eps - 1 >= 0 and
    a direct bound no larger than the closed form (N = n ceil(ln n), eps = delta ln n / n).

    Returns n_max + 1 if even n_max fails.
    """
    delta = d + 2 if delta is None else delta
    n0 = n_max + 1
    for n in range(n_max, 1, -1):
        if not _simplification_holds(n, d, delta):
            break
        n0 = n
    return n0


def drop_n(i: int) -> ExactLog2:
    """n_i = 2**(2**i + 2 i)."""
    return ExactLog2.pow2(2 ** i + 2 * i)


def f0_threshold(i: int) -> ExactLog2:
    """(n_i + 1) s_i / 2, the lower bound on E[f0] at n_i + 1 samples."""
    return (drop_n(i) + 1) * drop_s(i) / 2


def _log_one_minus(x: ExactLog2) -> ExactLog2:
    # ln(1 - x) for 0 <= x < 1; below double range it is -x to all printed digits
    xf = x.to_float()
    if xf == 0.0 or xf < 1e-300:
        return -x
    return ExactLog2.from_float(math.log1p(-xf))


@dataclass(frozen=True)
class LedgerRow:
    i: int
    s: ExactLog2
    p: ExactLog2
    n: ExactLog2
    log_n_over_n: ExactLog2
    nu_lower: ExactLog2          # sqrt(2) s_{i+1} / (pi (i+1)), lower bound on nu(h_i)
    nu_prev: ExactLog2           # nu(h_{i-1}) from the series
    nu_cur: ExactLog2            # nu(h_i) from the series
    chain_middle: ExactLog2      # s_i sqrt(2) / (pi i)
    identity_ok: bool            # p_i == s_i (1 - s_i / 4)
    scalar_lhs: float            # 2**-i (1 + 2**(1-i) i)
    scalar_rhs: float            # sqrt(2) / (pi i)
    chain_check: bool
    nu_prev_ok: bool             # s_i sqrt(2) / (pi i) <= nu(h_{i-1})
    nu_cur_ok: bool              # nu(h_i) >= nu_lower
    wet_value: ExactLog2         # w(log2 n_i / n_i)
    bracket: float               # (p_i / s_i) (1 - s_{i+1})**(n_i + 1)

    @property
    def wet_ok(self) -> bool:
        return self.wet_value == self.s

    @property
    def bracket_ok(self) -> bool:
        return self.bracket > 0.5


def theorem3_ledger(i: int, seq: DropSequence | None = None) -> LedgerRow:
    """All drop-sequence quantities at index i, with the i >= 4 inequality chain.

    The chain is log2(n_i)/n_i = (s_i/4) 2**-i (1 + 2**(1-i) i) < s_i sqrt(2)/(pi i),
    together with the scalar form 2**-i (1 + 2**(1-i) i) < sqrt(2)/(pi i).
    """
    if not 1 <= i <= 60:
        raise ValueError("i must lie in [1, 60]")
    seq = seq or DropSequence()
    s, p, n = drop_s(i), drop_p(i), drop_n(i)
    log_n = 2 ** i + 2 * i
    log_n_over_n = ExactLog2.from_int(log_n) / n
    s_next = drop_s(i + 1)
    nu_lower = s_next * (_SQRT2 / (math.pi * (i + 1)))
    nu_prev = ExactLog2.from_float(0.5) if i == 1 else seq.tangent_mass_log(i - 1)
    nu_cur = seq.tangent_mass_log(i)
    chain_middle = s * (_SQRT2 / (math.pi * i))
    identity_ok = p == s * (1 - s / 4)
    scalar_lhs = 2.0 ** -i * (1.0 + 2.0 ** (1 - i) * i)
    scalar_rhs = _SQRT2 / (math.pi * i)
    chain = bool(log_n_over_n < chain_middle and scalar_lhs < scalar_rhs)
    # (1 - s_{i+1})**(n_i + 1) = exp((n_i + 1) ln(1 - s_{i+1}))
    expo = ((n + 1) * _log_one_minus(s_next)).to_float()
    bracket = (p / s).to_float() * math.exp(expo)
    return LedgerRow(
        i=i, s=s, p=p, n=n, log_n_over_n=log_n_over_n, nu_lower=nu_lower,
        nu_prev=nu_prev, nu_cur=nu_cur, chain_middle=chain_middle,
        identity_ok=bool(identity_ok), scalar_lhs=scalar_lhs, scalar_rhs=scalar_rhs,
        chain_check=chain, nu_prev_ok=bool(chain_middle <= nu_prev),
        nu_cur_ok=bool(nu_cur >= nu_lower),
        wet_value=drop_wet_measure(log_n_over_n, seq), bracket=bracket)


def arccos_inequality_check(grid: Sequence[float]) -> float:
    """max over y of sqrt(2y) - arccos(1 - y); nonpositive when arccos(1-y) >= sqrt(2y) holds."""
    y = np.asarray(grid, dtype=float)
    if y.size == 0:
        raise ValueError("empty grid")
    if ((y < 0) | (y > 1)).any():
        raise ValueError("grid values must lie in [0, 1]")
    return float(np.max(np.sqrt(2.0 * y) - np.arccos(1.0 - y)))


@dataclass(frozen=True)
class EnvelopeRow:
    n: int
    lower: float        # w(1/n) / 4
    upper: float        # w((d+2) ln n / n) + eps_d(n) / n
    failure: float      # direct bound on Pr[floating body not inside P_n]
    valid: bool         # n >= n0, where the closed-form slack is established


@dataclass(frozen=True)
class BoundReport:
    d: int
    n0: int
    rows: tuple[EnvelopeRow, ...]

    def row(self, n: int) -> EnvelopeRow:
        for r in self.rows:
            if r.n == n:
                return r
        raise KeyError(n)


def _w(m: Measure, t: float) -> float:
    return 1.0 if t >= 1.0 else float(wet_measure(m, t))


def theorem2_envelopes(m: Measure, n_grid: Sequence[int], d: int = 2) -> BoundReport:
    """Both envelope curves of E[1 - mu(P_n)] on a grid of n >= 2.

    n0 comes from a full scan of [2, 20000]; grid points beyond that range are
    checked individually.
    """
    delta = d + 2
    n0 = kpw_simplification_n0(d, delta)
    rows = []
    for n in n_grid:
        if n < 2:
            raise ValueError("envelopes need n >= 2")
        N, eps = _net_params(n, delta)
        failure = kpw_failure_bound(N, n, eps, d) if (N > n and eps < 1.0) else math.inf
        upper = _w(m, delta * math.log(n) / n) + theorem2_epsilon(n, d) / n
        valid = n >= n0 and (n <= 20000 or _simplification_holds(n, d, delta))
        rows.append(EnvelopeRow(n, 0.25 * _w(m, 1.0 / n), upper, failure, valid))
    return BoundReport(d, n0, tuple(rows))
