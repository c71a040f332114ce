"""Fair-price AMM engine for conditional-token betting markets.

Pricing references an externally supplied probability vector (the fair
prices) instead of pool reserves alone.  A bet of ``d`` collateral on
outcome ``i`` mints a uniform token set, keeps the ``i`` leg, and swaps every
other leg for more ``i`` tokens; the sum is the payout ("odd").  The swap
rate is fair (``rho = f_in / f_out``) while the output pool sits above the
LP target balance TB, and charges constant-product-style slippage once the
pool dips below TB.

The engine keeps two faces:

* pure quoting (:func:`calc_odds`, :func:`spot_price`) in float arithmetic,
  never touching live state;
* execution (:meth:`UammMarket.buy`) in fixed-point arithmetic against the
  conditional-token ledger, so conservation stays exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
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


class UnfillableQuote(Exception):
    """The requested wager would drain the output pool below zero."""


class FairPriceVector:
    """Outcome probabilities used as the engine's pricing reference.

    Probabilities must each lie in (0, 1) and sum to 1 within 1e-9; the
    vector is renormalized so the stored floats sum to exactly 1.0.
    """

    def __init__(self, probs):
        p = [float(x) for x in probs]
        if len(p) < 2:
            raise ValueError("need at least two outcome probabilities")
        if any(not (0.0 < x < 1.0) for x in p):
            raise ValueError(f"probabilities must lie in (0, 1): {p}")
        s = math.fsum(p)
        if abs(s - 1.0) > 1e-9:
            raise ValueError(f"probabilities sum to {s!r}, not 1")
        p = [x / s for x in p]
        p[-1] = 1.0 - math.fsum(p[:-1])
        self._p = tuple(p)

    @property
    def probs(self) -> tuple[float, ...]:
        return self._p

    def of(self, k: int) -> float:
        """Probability of outcome ``k`` (1-based)."""
        return self._p[k - 1]

    def __len__(self):
        return len(self._p)

    def __iter__(self):
        return iter(self._p)

    def __repr__(self):
        return f"FairPriceVector({list(self._p)})"


def swap_out(d_in: float, f_in: float, f_out: float, r_out: float, tb: float) -> float:
    """Output-token amount received for ``d_in`` input tokens.

    Piecewise in the output pool balance ``r_out`` relative to the target
    balance ``tb`` (branches evaluated strictly in this order):

    1. straddling the target: partial slippage,
    2. pool above target: the fair amount ``rho * d_in`` exactly,
    3. pool below target: constant-product slippage with invariant
       ``x * r_out = tb**2``.
    """
    if d_in < 0:
        raise ValueError("swap input must be non-negative")
    if d_in == 0.0 or r_out <= 0.0:
        return 0.0
    rho = f_in / f_out
    delta = rho * d_in
    x = 0.0 if tb <= 0.0 else tb * tb / r_out
    if r_out - delta <= tb <= r_out:
        alpha = r_out / (x + delta)
        return alpha * delta + (rho - alpha) * (r_out - tb)
    if tb <= r_out:
        return delta
    return r_out - tb * tb / (x + delta)


@dataclass
class PoolState:
    """Mutable AMM pool: collateral + K conditional balances, LP bookkeeping.

    ``r[0]`` is the collateral pool, ``r[k]`` the pool of outcome token ``k``.
    ``ts`` is the total LP-share supply, ``tb`` the net LP investment valued
    at fair prices (the target balance).  Shares and TB are bookkeeping
    quantities and stay at full Decimal precision; only token movements are
    quantized, and only at the ledger boundary.
    """

    r: list[Decimal]
    ts: Decimal = ZERO
    tb: Decimal = ZERO
    fee_accrued: Decimal = ZERO
    treasury_shares: Decimal = ZERO

    @classmethod
    def empty(cls, k: int) -> "PoolState":
        return cls(r=[ZERO] * (k + 1))

    @property
    def k(self) -> int:
        return len(self.r) - 1

    def copy(self) -> "PoolState":
        return PoolState(
            r=list(self.r),
            ts=self.ts,
            tb=self.tb,
            fee_accrued=self.fee_accrued,
            treasury_shares=self.treasury_shares,
        )

    def total_value(self, fair: FairPriceVector) -> Decimal:
        """Expected collateral value of pool holdings: r0 + sum f_k * r_k."""
        tv = self.r[0]
        for k in range(1, self.k + 1):
            tv += Decimal(fair.of(k)) * self.r[k]
        return tv

    def add(self, d: Decimal, fair: FairPriceVector) -> Decimal:
        """Deposit ``d`` collateral; mint shares at the pre-add share price.

        At genesis (ts == 0) shares bootstrap 1:1 with the deposit.
        """
        if d <= 0:
            raise ValueError("liquidity deposit must be positive")
        if self.ts == 0:
            s_lp = d
        else:
            s_lp = d * self.ts / self.total_value(fair)
        self.r[0] += d
        self.tb += d
        self.ts += s_lp
        return s_lp

    def remove(self, s_lp: Decimal, quantize=None) -> Decimal:
        """Burn shares for a pro-rata slice of the *collateral* pool.

        Conditional-token balances are locked until resolution, so only
        ``r0 * s_lp / ts`` pays out.  TB scales down by the same share
        fraction.  ``quantize`` (e.g. :func:`uamm_lab.fixedpoint.amount`)
        rounds the payout when it is leaving toward a real account.
        """
        if s_lp <= 0:
            raise ValueError("share amount must be positive")
        if s_lp > self.ts:
            raise InsufficientBalance(f"pool supply {self.ts} < {s_lp}")
        payout = self.r[0] * s_lp / self.ts
        if quantize is not None:
            payout = quantize(payout)
        self.tb -= self.tb * s_lp / self.ts
        self.r[0] -= payout
        self.ts -= s_lp
        return payout


@dataclass(frozen=True)
class Quote:
    """An indicative (non-mutating) odds quotation for one wager."""

    engine: str
    market_id: str
    outcome: int
    wager: float
    odd: float
    implied_price: float
    slippage: float
    fee: float
    post_r: tuple[float, ...]
    post_tb: float
    fair: tuple[float, ...]

    @property
    def decimal_odds(self) -> float:
        return self.odd / self.wager if self.wager else 0.0

    def csv_row(self) -> dict:
        return {
            "engine": self.engine,
            "market_id": self.market_id,
            "outcome": self.outcome,
            "wager": repr(self.wager),
            "odd": repr(self.odd),
            "implied_price": repr(self.implied_price),
            "slippage": repr(self.slippage),
            "fee": repr(self.fee),
        }


def calc_odds(
    pool: PoolState,
    fair: FairPriceVector,
    i: int,
    wager,
    fee_rate=0,
    market_id: str = "",
    engine: str = "uamm",
) -> Quote:
    """Quote the payout for betting ``wager`` collateral on outcome ``i``.

    Runs the buy pipeline (mint, combine, swap each other leg, merge) on a
    float scratch copy of the pool; the live pool is never mutated.
    """
    K = pool.k
    if not 1 <= i <= K:
        raise ValueError(f"unknown outcome {i} for a {K}-outcome market")
    d = float(wager)
    if d < 0:
        raise ValueError("wager must be non-negative")
    f = fair.probs
    if d == 0.0:
        return Quote(
            engine, market_id, i, 0.0, 0.0, f[i - 1], 0.0, 0.0,
            tuple(float(x) for x in pool.r), float(pool.tb), f,
        )
    r = [float(x) for x in pool.r]
    tb = float(pool.tb)
    # combine collateral liquidity into every conditional pool
    c = r[0]
    r[0] = 0.0
    for k in range(1, K + 1):
        r[k] += c
    odd = d
    fi = f[i - 1]
    for j in range(1, K + 1):
        if j == i:
            continue
        r[j] += d
        s = swap_out(d, f[j - 1], fi, r[i], tb)
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
        engine, market_id, i, d, odd, implied, implied - fi,
        float(fee_rate) * d, tuple(r), tb, f,
    )


def spot_price(pool: PoolState, fair: FairPriceVector, i: int, eps: float = 1e-4) -> float:
    """Marginal implied probability for outcome ``i`` (price of an
    infinitesimal wager, probed numerically at ``eps`` collateral)."""
    return calc_odds(pool, fair, i, eps).implied_price


@dataclass(frozen=True)
class BetRecord:
    """An executed bet and the pool state it left behind."""

    index: int
    market_id: str
    outcome: int
    wager: Decimal
    fee: Decimal
    odd: Decimal
    s_lp: Decimal
    implied_price: float
    slippage: float
    post_r: tuple[float, ...]


@dataclass
class UammMarket:
    """One betting market: ledger + fair-price AMM pool, single writer.

    All mutations of a market are serialized through this object; distinct
    markets share no state and may run in parallel.
    """

    spec: MarketSpec
    fair: FairPriceVector
    engine = "uamm"

    def __post_init__(self):
        if not isinstance(self.fair, FairPriceVector):
            self.fair = FairPriceVector(self.fair)
        if len(self.fair) != self.spec.k:
            raise ValueError("fair-price vector length must equal K")
        self.ledger = ConditionalLedger(self.spec)
        self.pool = PoolState.empty(self.spec.k)
        self.lp_shares: dict[str, Decimal] = {}
        self.bets: list[BetRecord] = []

    # -- convenience passthroughs -------------------------------------------

    def deposit(self, account: str, d) -> None:
        self.ledger.deposit(account, d)

    @property
    def phase(self) -> Phase:
        return self.ledger.phase

    # -- liquidity provision --------------------------------------------------

    def add_liquidity(self, account: str, d) -> Decimal:
        if self.ledger.phase is not Phase.OPEN:
            raise PhaseError("liquidity can only be added while betting is open")
        d = amount(d)
        if d <= 0:
            raise ValueError("liquidity deposit must be positive")
        self.ledger.debit(account, COLLATERAL, d)
        s_lp = self.pool.add(d, self.fair)
        self.lp_shares[account] = self.lp_shares.get(account, ZERO) + s_lp
        return s_lp

    def remove_liquidity(self, account: str, s_lp: Decimal) -> Decimal:
        held = self.lp_shares.get(account, ZERO)
        if s_lp > held:
            raise InsufficientBalance(f"{account} holds {held} shares, needs {s_lp}")
        payout = self.pool.remove(s_lp, quantize=amount)
        self.lp_shares[account] = held - s_lp
        self.ledger.credit(account, COLLATERAL, payout)
        return payout

    # -- betting ----------------------------------------------------------------

    def quote(self, i: int, wager) -> Quote:
        if self.ledger.phase is not Phase.OPEN:
            raise PhaseError("market is not open for betting")
        return calc_odds(
            self.pool, self.fair, i, wager,
            fee_rate=self.spec.fee_rate, market_id=self.spec.market_id,
        )

    def buy(self, account: str, i: int, wager) -> BetRecord:
        """Execute a bet: fee on top, mint, combine, swap legs, merge, pay out.

        Treasury LP shares minted by the operation accrue to the pool's
        treasury tally, not to the bettor.
        """
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
        f = self.fair.probs
        fi = f[i - 1]
        # Work on a scratch copy; commit only if every leg is fillable.
        rw = list(self.pool.r)
        locked_delta = d  # the bettor's working set
        c = rw[0]
        locked_delta += c  # combine: collateral pool minted into K sets
        rw[0] = ZERO
        for k in range(1, K + 1):
            rw[k] += c
        tbf = float(self.pool.tb)
        odd = d
        for j in range(1, K + 1):
            if j == i:
                continue
            rw[j] += d
            s = amount(swap_out(float(d), f[j - 1], fi, float(rw[i]), tbf))
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
        # commit
        self.ledger.debit(account, COLLATERAL, d + fee)
        self.ledger.credit(account, i, odd)
        self.ledger.locked += locked_delta
        self.pool.r = rw
        self.pool.fee_accrued += fee
        tv = self.pool.total_value(self.fair)
        if self.pool.ts > 0 and tv > 0:
            s_lp = d * self.pool.ts / tv
        else:
            s_lp = ZERO
        self.pool.ts += s_lp
        self.pool.treasury_shares += s_lp
        implied = float(d) / float(odd)
        record = BetRecord(
            index=len(self.bets),
            market_id=self.spec.market_id,
            outcome=i,
            wager=d,
            fee=fee,
            odd=odd,
            s_lp=s_lp,
            implied_price=implied,
            slippage=implied - fi,
            post_r=tuple(float(x) for x in rw),
        )
        self.bets.append(record)
        return record

    # -- resolution ---------------------------------------------------------------

    def close_betting(self) -> None:
        self.ledger.close_betting()

    def resolve(self, caller: str, winner: int) -> None:
        self.ledger.resolve(caller, winner)

    def redeem(self, account: str) -> Decimal:
        return self.ledger.redeem(account)

    def redeem_pool(self) -> Decimal:
        """Settle the pool's own conditional holdings after resolution."""
        if self.ledger.phase is not Phase.RESOLVED:
            raise PhaseError("market is not resolved")
        w = self.pool.r[self.ledger.winner]
        for k in self.spec.outcomes:
            self.pool.r[k] = ZERO
        self.pool.r[0] += w
        self.ledger.locked -= w
        return w

    # -- snapshot -------------------------------------------------------------------

    def snapshot(self) -> str:
        """Canonical key/value text of full market state, sorted by key."""
        items = dict(self.ledger.snapshot_items())
        items["engine"] = self.engine
        for k, v in enumerate(self.pool.r):
            items[f"pool/r{k}"] = str(v)
        items["pool/ts"] = str(self.pool.ts)
        items["pool/tb"] = str(self.pool.tb)
        items["pool/fee_accrued"] = str(self.pool.fee_accrued)
        items["pool/treasury_shares"] = str(self.pool.treasury_shares)
        for account, s in self.lp_shares.items():
            items[f"lp/{account}"] = str(s)
        return "\n".join(f"{k}={items[k]}" for k in sorted(items)) + "\n"
