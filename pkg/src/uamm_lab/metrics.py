"""Liquidity-provider profit/loss metrics over simulated market trajectories.

All formulas run over the conditional pools only (k = 1..K); a supplementary
expected-value PnL that includes the collateral pool is reported alongside
for reconciliation, since stranded conditional balances and merged collateral
tell different stories about the same pool.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from decimal import Decimal

import numpy as np

from .uamm import FairPriceVector, PoolState, Quote, spot_price


def ev(r_cond, fair) -> float:
    """Expected value of conditional pool balances under the fair prices.

    ``sum_k [ f_k * R_k - (1 - f_k) * (Z - R_k) ]`` with ``Z = sum_k R_k``:
    each pool's long leg priced at its probability minus the short side of
    the rest of the pool.
    """
    r = [float(x) for x in r_cond]
    f = list(fair)
    z = math.fsum(r)
    return math.fsum(
        fk * rk - (1.0 - fk) * (z - rk) for fk, rk in zip(f, r)
    )


def pool_deltas(result) -> list[float]:
    """Per-outcome pool balance change over a market's lifetime."""
    return [
        result.r_end[k] - result.r_start[k]
        for k in range(1, len(result.r_start))
    ]


def eip_values(results) -> list[float]:
    """Impermanent PnL per market: pool deltas valued at fair prices."""
    return [
        math.fsum(f * d for f, d in zip(r.fair, pool_deltas(r)))
        for r in results
    ]


def epp_values(results) -> list[float]:
    """Permanent PnL per market: the sampled winner's pool delta."""
    vals = []
    for r in results:
        if r.winner is None:
            raise ValueError(f"market {r.market_id} has no sampled winner")
        vals.append(pool_deltas(r)[r.winner - 1])
    return vals


def eip(results) -> tuple[float, float]:
    vals = eip_values(results)
    return float(np.mean(vals)), float(np.std(vals))


def epp(results) -> tuple[float, float]:
    vals = epp_values(results)
    return float(np.mean(vals)), float(np.std(vals))


def tv_pnl_values(results) -> list[float]:
    """Expected-value PnL including the collateral pool: TV_end - TV_start."""
    out = []
    for r in results:
        tv0 = r.r_start[0] + math.fsum(f * x for f, x in zip(r.fair, r.r_start[1:]))
        tv1 = r.r_end[0] + math.fsum(f * x for f, x in zip(r.fair, r.r_end[1:]))
        out.append(tv1 - tv0)
    return out


def vigorish(quotes: list[Quote]) -> float:
    """Mean overround: sum of marginal implied prices minus 1, per quote."""
    if not quotes:
        raise ValueError("need at least one quote")
    vals = []
    for q in quotes:
        pool = PoolState(r=[Decimal(repr(x)) for x in q.post_r], tb=Decimal(repr(q.post_tb)))
        fair = FairPriceVector(q.fair)
        total = math.fsum(
            spot_price(pool, fair, i) for i in range(1, len(q.fair) + 1)
        )
        vals.append(total - 1.0)
    return float(np.mean(vals))


@dataclass
class MetricsReport:
    """Aggregate result bundle for one experiment."""

    engine: str
    n_markets: int
    total_bets: int
    accepted: int
    rejected: int
    unfillable: int
    volume: Decimal
    fee_revenue: Decimal
    ev_mean: float
    eip_mean: float
    eip_std: float
    epp_mean: float
    epp_std: float
    tp: float
    tv_pnl_mean: float
    vigorish: float

    @property
    def rejection_rate(self) -> float:
        return (self.rejected + self.unfillable) / self.total_bets if self.total_bets else 0.0

    @property
    def epp_plus_fee(self) -> float:
        """Permanent PnL per market plus total fee revenue (fee on top)."""
        return self.epp_mean + float(self.fee_revenue)

    def csv_row(self) -> dict:
        return {
            "engine": self.engine,
            "n_markets": self.n_markets,
            "total_bets": self.total_bets,
            "accepted": self.accepted,
            "rejected": self.rejected,
            "unfillable": self.unfillable,
            "rejection_rate": repr(self.rejection_rate),
            "volume": str(self.volume),
            "fee_revenue": str(self.fee_revenue),
            "ev_mean": repr(self.ev_mean),
            "eip_mean": repr(self.eip_mean),
            "eip_std": repr(self.eip_std),
            "epp_mean": repr(self.epp_mean),
            "epp_std": repr(self.epp_std),
            "tp": repr(self.tp),
            "tv_pnl_mean": repr(self.tv_pnl_mean),
            "epp_plus_fee": repr(self.epp_plus_fee),
            "vigorish": repr(self.vigorish),
        }


def summarize(results, engine: str) -> MetricsReport:
    """Fold per-market results into a :class:`MetricsReport`."""
    if not results:
        raise ValueError("no market results to summarize")
    eip_mean, eip_std = eip(results)
    epp_mean, epp_std = epp(results)
    ev_mean = float(np.mean([ev(r.r_end[1:], r.fair) for r in results]))
    volume = sum((r.volume for r in results), Decimal(0))
    fee = sum((r.fee for r in results), Decimal(0))
    return MetricsReport(
        engine=engine,
        n_markets=len(results),
        total_bets=sum(r.n_attempts for r in results),
        accepted=sum(r.n_accepted for r in results),
        rejected=sum(r.n_rejected for r in results),
        unfillable=sum(r.n_unfillable for r in results),
        volume=volume,
        fee_revenue=fee,
        ev_mean=ev_mean,
        eip_mean=eip_mean,
        eip_std=eip_std,
        epp_mean=epp_mean,
        epp_std=epp_std,
        tp=len(results) * epp_mean,
        tv_pnl_mean=float(np.mean(tv_pnl_values(results))),
        vigorish=float(np.mean([r.overround_final for r in results])),
    )


def recompute_from_records(results) -> dict:
    """Independent brute-force recomputation of EV/EIP/EPP from raw bets.

    Re-derives each market's final pool state from its bet records (the last
    record's post-trade snapshot) instead of trusting the streaming pool
    state, and re-evaluates the formulas with plain Python loops.  Used as a
    cross-check oracle against :func:`summarize`.
    """
    eip_vals = []
    epp_vals = []
    ev_vals = []
    for r in results:
        r_end = r.records[-1].post_r if r.records else r.r_start
        k_count = len(r_end) - 1
        deltas = []
        for k in range(1, k_count + 1):
            deltas.append(r_end[k] - r.r_start[k])
        acc_eip = 0.0
        for f, d in zip(r.fair, deltas):
            acc_eip += f * d
        eip_vals.append(acc_eip)
        epp_vals.append(deltas[r.winner - 1])
        z = 0.0
        for k in range(1, k_count + 1):
            z += r_end[k]
        acc_ev = 0.0
        for f, rk in zip(r.fair, r_end[1:]):
            acc_ev += f * rk - (1.0 - f) * (z - rk)
        ev_vals.append(acc_ev)
    m = len(results)
    return {
        "eip_mean": sum(eip_vals) / m,
        "epp_mean": sum(epp_vals) / m,
        "ev_mean": sum(ev_vals) / m,
    }
