"""Constant-product comparison engine.

Prices come purely from pool reserves (the classic ``x * y = k`` rule), with
no fair-price reference -- exactly the behaviour the fair-price engine is
meant to improve on.  The bet pipeline mirrors the main engine (mint,
combine, swap each non-chosen leg, merge) with the product rule substituted
for the swap step, and runs over the same conditional-token ledger so the
conservation invariants are identical.

Initial reserves are seeded proportional to ``1 / f_k`` so that the implied
prices at launch equal the true outcome probabilities; after that the pool
is on its own.
"""

from __future__ import annotations

from dataclasses import dataclass
from decimal import Decimal

from .fixedpoint import ZERO, amount
from .ledger import (
    COLLATERAL,
    ConditionalLedger,
    InsufficientBalance,
    MarketSpec,
    Phase,
    PhaseError,
)
from .uamm import BetRecord, FairPriceVector, Quote, UnfillableQuote


def cpmm_swap(d_in: float, r_in: float, r_out: float) -> float:
    """Output amount under the product rule: r_out - r_in*r_out/(r_in + d_in)."""
    if d_in < 0:
        raise ValueError("swap input must be non-negative")
    if d_in == 0.0 or r_out <= 0.0:
        return 0.0
    return r_out - (r_in * r_out) / (r_in + d_in)


@dataclass
class CpmmPool:
    """Reserve balances; r[0] holds merged collateral between bets."""

    r: list[Decimal]
    fee_accrued: Decimal = ZERO

    @classmethod
    def empty(cls, k: int) -> "CpmmPool":
        return cls(r=[ZERO] * (k + 1))

    @property
    def k(self) -> int:
        return len(self.r) - 1


@dataclass
class CpmmMarket:
    """Constant-product betting market over the conditional-token ledger."""

    spec: MarketSpec
    fair: FairPriceVector
    engine = "cpmm"

    def __post_init__(self):
        if not isinstance(self.fair, FairPriceVector):
            self.fair = FairPriceVector(self.fair)
        if len(self.fair) != self.spec.k:
            raise ValueError("fair-price vector length must equal K")
        self.ledger = ConditionalLedger(self.spec)
        self.pool = CpmmPool.empty(self.spec.k)
        self.lp_shares: dict[str, Decimal] = {}
        self.bets: list[BetRecord] = []

    def deposit(self, account: str, d) -> None:
        self.ledger.deposit(account, d)

    @property
    def phase(self) -> Phase:
        return self.ledger.phase

    def add_liquidity(self, account: str, funding) -> Decimal:
        """Seed reserves from ``funding`` collateral at true-probability prices.

        The LP mints a full set and hands the pool ``funding * f_min / f_k``
        of each token; the excess tokens of likelier outcomes stay with the
        LP (they cannot be merged without the scarcer legs).
        """
        if self.ledger.phase is not Phase.OPEN:
            raise PhaseError("liquidity can only be added while betting is open")
        funding = amount(funding)
        if funding <= 0:
            raise ValueError("funding must be positive")
        f = self.fair.probs
        fmin = min(f)
        self.ledger.mint(account, funding)
        for k in self.spec.outcomes:
            reserve = amount(float(funding) * fmin / f[k - 1])
            self.ledger.debit(account, k, reserve)
            self.pool.r[k] += reserve
        self.lp_shares[account] = self.lp_shares.get(account, ZERO) + funding
        return funding

    def quote(self, i: int, wager) -> Quote:
        if self.ledger.phase is not Phase.OPEN:
            raise PhaseError("market is not open for betting")
        K = self.spec.k
        if not 1 <= i <= K:
            raise ValueError(f"unknown outcome {i} for a {K}-outcome market")
        d = float(wager)
        if d < 0:
            raise ValueError("wager must be non-negative")
        f = self.fair.probs
        if d == 0.0:
            return Quote(
                self.engine, self.spec.market_id, i, 0.0, 0.0, f[i - 1], 0.0,
                0.0, tuple(float(x) for x in self.pool.r), 0.0, f,
            )
        r = [float(x) for x in self.pool.r]
        c = r[0]
        r[0] = 0.0
        for k in range(1, K + 1):
            r[k] += c
        odd = d
        for j in range(1, K + 1):
            if j == i:
                continue
            s = cpmm_swap(d, r[j], r[i])
            r[j] += d
            if s > r[i]:
                raise UnfillableQuote(
                    f"wager {d} on outcome {i} would drain the pool"
                )
            r[i] -= s
            odd += s
        m = min(r[1:])
        r[0] = m
        for k in range(1, K + 1):
            r[k] -= m
        implied = d / odd
        return Quote(
            self.engine, self.spec.market_id, i, d, odd, implied,
            implied - f[i - 1], float(self.spec.fee_rate) * d, tuple(r), 0.0, f,
        )

    def buy(self, account: str, i: int, wager) -> BetRecord:
        if self.ledger.phase is not Phase.OPEN:
            raise PhaseError("market is not open for betting")
        K = self.spec.k
        if not 1 <= i <= K:
            raise ValueError(f"unknown outcome {i} for a {K}-outcome market")
        d = amount(wager)
        if d < 0:
            raise ValueError("wager must be non-negative")
        if d == 0:
            return BetRecord(
                len(self.bets), self.spec.market_id, i, ZERO, ZERO, ZERO, ZERO,
                self.fair.of(i), 0.0, tuple(float(x) for x in self.pool.r),
            )
        fee = d * self.spec.fee_rate
        if self.ledger.balance(account) < d + fee:
            raise InsufficientBalance(
                f"{account} cannot cover wager {d} plus fee {fee}"
            )
        fi = self.fair.of(i)
        rw = list(self.pool.r)
        locked_delta = d
        c = rw[0]
        locked_delta += c
        rw[0] = ZERO
        for k in range(1, K + 1):
            rw[k] += c
        odd = d
        for j in range(1, K + 1):
            if j == i:
                continue
            s = amount(cpmm_swap(float(d), float(rw[j]), float(rw[i])))
            rw[j] += d
            if s < 0 or s > rw[i]:
                raise UnfillableQuote(
                    f"wager {d} on outcome {i} would drain the pool"
                )
            rw[i] -= s
            odd += s
        m = min(rw[1:])
        rw[0] = m
        for k in range(1, K + 1):
            rw[k] -= m
        locked_delta -= m
        self.ledger.debit(account, COLLATERAL, d + fee)
        self.ledger.credit(account, i, odd)
        self.ledger.locked += locked_delta
        self.pool.r = rw
        self.pool.fee_accrued += fee
        implied = float(d) / float(odd)
        record = BetRecord(
            index=len(self.bets),
            market_id=self.spec.market_id,
            outcome=i,
            wager=d,
            fee=fee,
            odd=odd,
            s_lp=ZERO,
            implied_price=implied,
            slippage=implied - fi,
            post_r=tuple(float(x) for x in rw),
        )
        self.bets.append(record)
        return record

    def close_betting(self) -> None:
        self.ledger.close_betting()

    def resolve(self, caller: str, winner: int) -> None:
        self.ledger.resolve(caller, winner)

    def redeem(self, account: str) -> Decimal:
        return self.ledger.redeem(account)

    def redeem_pool(self) -> Decimal:
        if self.ledger.phase is not Phase.RESOLVED:
            raise PhaseError("market is not resolved")
        w = self.pool.r[self.ledger.winner]
        for k in self.spec.outcomes:
            self.pool.r[k] = ZERO
        self.pool.r[0] += w
        self.ledger.locked -= w
        return w

    def snapshot(self) -> str:
        items = dict(self.ledger.snapshot_items())
        items["engine"] = self.engine
        for k, v in enumerate(self.pool.r):
            items[f"pool/r{k}"] = str(v)
        items["pool/fee_accrued"] = str(self.pool.fee_accrued)
        for account, s in self.lp_shares.items():
            items[f"lp/{account}"] = str(s)
        return "\n".join(f"{k}={items[k]}" for k in sorted(items)) + "\n"
