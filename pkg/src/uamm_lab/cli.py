"""Command-line driver.

Subcommands::

    uamm-lab quote     --k 2 --probs 0.5,0.5 --funding 10000 --outcome 1 --wager 10
    uamm-lab simulate  --config run.cfg --mode single|multi|full|sweep [--out DIR]
    uamm-lab probe     [--continuity] [--properties]

``simulate`` writes fixed-schema CSVs into the output directory:

* ``bets.csv``      -- engine, market_id, bet_index, outcome, wager, odd,
  implied_price, slippage, fee, accepted, reject_reason
* ``markets.csv``   -- engine, market_id, k, probs, winner, n_attempts,
  n_accepted, n_rejected, n_unfillable, volume, fee, eip, epp, tv_pnl,
  ev_final, overround_final, r_start, r_end (vectors ';'-joined)
* ``summary.csv``   -- one aggregate row (mode, seed + metrics columns)
* per-mode plot-data files (x/y columns ready for any external plotter)

The ``UAMM_LAB_SEED`` environment variable overrides the configured seed.
Exit codes: 0 success, 1 usage/config error, 2 invariant violation.
"""

from __future__ import annotations

import argparse
import csv
import math
import os
import sys
from pathlib import Path

from . import metrics, sim
from .fixedpoint import amount
from .probes import continuity_report, property_report
from .sim import ConfigError, SimConfig
from .uamm import FairPriceVector, UnfillableQuote

PROPERTY_TOLERANCE = 1e-9


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> _Parser:
    parser = _Parser(prog="uamm-lab", description=__doc__,
                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    q = sub.add_parser("quote", help="price a single wager on a fresh market")
    q.add_argument("--k", type=int, required=True, help="number of outcomes")
    q.add_argument("--probs", required=True,
                   help="comma-separated fair outcome probabilities (sum to 1)")
    q.add_argument("--funding", type=float, required=True,
                   help="initial LP collateral")
    q.add_argument("--outcome", type=int, required=True,
                   help="outcome index to bet on (1-based)")
    q.add_argument("--wager", type=float, required=True)
    q.add_argument("--fee-rate", type=float, default=0.025)
    q.add_argument("--format", choices=("text", "csv"), default="text")

    s = sub.add_parser("simulate", help="run a seeded betting experiment")
    s.add_argument("--config", help="flat key=value config file")
    s.add_argument("--mode", choices=("single", "multi", "full", "sweep"),
                   default="multi")
    s.add_argument("--engine", choices=sim.ENGINES,
                   help="override the configured engine")
    s.add_argument("--seed", type=int, help="override the configured seed")
    s.add_argument("--out", default="out", help="output directory")

    p = sub.add_parser("probe", help="run engine property / continuity probes")
    p.add_argument("--continuity", action="store_true",
                   help="swap branch-boundary continuity grid (report only)")
    p.add_argument("--properties", action="store_true",
                   help="liquidity additivity/reversibility suite (asserted)")
    return parser


def _write_csv(path: Path, fieldnames: list[str], rows: list[dict]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=fieldnames)
        writer.writeheader()
        writer.writerows(rows)


def cmd_quote(args) -> int:
    probs = tuple(float(x) for x in args.probs.split(","))
    if len(probs) != args.k:
        raise UsageError(f"--probs lists {len(probs)} values for --k {args.k}")
    FairPriceVector(probs)  # validates range and sum
    market = sim.build_market(
        "uamm", "quote", args.k, probs, args.funding, args.fee_rate,
    )
    quote = market.quote(args.outcome, amount(args.wager))
    if args.format == "csv":
        row = quote.csv_row()
        writer = csv.DictWriter(sys.stdout, fieldnames=list(row))
        writer.writeheader()
        writer.writerow(row)
    else:
        print(f"outcome        {quote.outcome}")
        print(f"wager          {quote.wager}")
        print(f"odd            {quote.odd:.6f}")
        print(f"decimal odds   {quote.decimal_odds:.6f}")
        print(f"implied price  {quote.implied_price:.6f}")
        print(f"slippage       {quote.slippage:.6f}")
        print(f"fee            {quote.fee:.6f}")
    return 0


BETS_FIELDS = ["engine", "market_id", "bet_index", "outcome", "wager", "odd",
               "implied_price", "slippage", "fee", "accepted", "reject_reason"]
MARKETS_FIELDS = ["engine", "market_id", "k", "probs", "winner", "n_attempts",
                  "n_accepted", "n_rejected", "n_unfillable", "volume", "fee",
                  "eip", "epp", "tv_pnl", "ev_final", "overround_final",
                  "r_start", "r_end"]


def _market_row(r) -> dict:
    deltas = metrics.pool_deltas(r)
    return {
        "engine": r.engine,
        "market_id": r.market_id,
        "k": r.k,
        "probs": ";".join(repr(p) for p in r.fair),
        "winner": r.winner,
        "n_attempts": r.n_attempts,
        "n_accepted": r.n_accepted,
        "n_rejected": r.n_rejected,
        "n_unfillable": r.n_unfillable,
        "volume": str(r.volume),
        "fee": str(r.fee),
        "eip": repr(math.fsum(f * d for f, d in zip(r.fair, deltas))),
        "epp": repr(deltas[r.winner - 1]),
        "tv_pnl": repr(metrics.tv_pnl_values([r])[0]),
        "ev_final": repr(metrics.ev(r.r_end[1:], r.fair)),
        "overround_final": repr(r.overround_final),
        "r_start": ";".join(repr(x) for x in r.r_start),
        "r_end": ";".join(repr(x) for x in r.r_end),
    }


def _write_run_outputs(out: Path, results, report, mode: str, seed: int) -> None:
    bet_rows = []
    for r in results:
        for row in r.bet_log:
            bet_rows.append({"engine": r.engine, "market_id": r.market_id, **row})
    _write_csv(out / "bets.csv", BETS_FIELDS, bet_rows)
    _write_csv(out / "markets.csv", MARKETS_FIELDS,
               [_market_row(r) for r in results])
    summary = {"mode": mode, "seed": seed, **report.csv_row()}
    _write_csv(out / "summary.csv", list(summary), [summary])


def cmd_simulate(args) -> int:
    cfg = sim.load_config(args.config) if args.config else SimConfig()
    if args.mode == "full" and not args.config:
        cfg = sim.full_config()
    overrides = {}
    if args.engine:
        overrides["engine"] = args.engine
    if args.seed is not None:
        overrides["seed"] = args.seed
    env_seed = os.environ.get("UAMM_LAB_SEED")
    if env_seed is not None:
        overrides["seed"] = int(env_seed)
    if overrides:
        cfg = sim.replace(cfg, **overrides)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    if args.mode == "single":
        result = sim.run_single_market(cfg)
        report = metrics.summarize([result], cfg.engine)
        _write_run_outputs(out, [result], report, args.mode, cfg.seed)
        k = result.k
        fields = (["step"] + [f"balance_{j}" for j in range(1, k + 1)]
                  + ["rejected_cum", "eip"])
        rows = []
        for t in result.trajectory:
            row = {"step": t["step"], "rejected_cum": t["rejected_cum"],
                   "eip": repr(t["eip"])}
            for j in range(1, k + 1):
                row[f"balance_{j}"] = repr(t["balances"][j - 1])
            rows.append(row)
        _write_csv(out / "plot_single_market.csv", fields, rows)
    elif args.mode in ("multi", "full"):
        runner = sim.run_full_market if args.mode == "full" else sim.run_multi_market
        results, report = runner(cfg, keep_log=True)
        _write_run_outputs(out, results, report, args.mode, cfg.seed)
        rows = [{"market_index": i,
                 "eip": _market_row(r)["eip"],
                 "epp": _market_row(r)["epp"],
                 "ev_final": _market_row(r)["ev_final"]}
                for i, r in enumerate(results)]
        _write_csv(out / "plot_markets.csv",
                   ["market_index", "eip", "epp", "ev_final"], rows)
    else:  # sweep
        sweep = sim.run_prob_sweep(cfg, keep_records=False)
        rows = [{k: (repr(v) if isinstance(v, float) else v) for k, v in r.items()}
                for r in sweep.rows]
        _write_csv(out / "plot_prob_sweep.csv",
                   ["prob", "side_mode", "eip_mean", "epp_mean", "epp_std",
                    "epp_se", "ev_mean", "epp_norm"], rows)
        band_rows = [{"side_mode": m,
                      "epp_spread_band": repr(b["epp_spread_band"]),
                      "epp_spread_observed": repr(b["epp_spread_observed"])}
                     for m, b in sweep.bands.items()]
        _write_csv(out / "sweep_bands.csv",
                   ["side_mode", "epp_spread_band", "epp_spread_observed"],
                   band_rows)
        rej = sim.run_rejection_sweep(cfg, keep_records=False)
        _write_csv(out / "plot_rejection_sweep.csv",
                   ["threshold", "acceptance_rate", "eip_mean", "epp_mean",
                    "volume"],
                   [{k: (repr(v) if isinstance(v, float) else v)
                     for k, v in r.items()} for r in rej])
        for m, b in sweep.bands.items():
            print(f"sweep[{m}]: epp spread {b['epp_spread_observed']:.6g} "
                  f"(declared band {b['epp_spread_band']:.6g})")
        return 0
    row = report.csv_row()
    print(", ".join(f"{k}={row[k]}" for k in
                    ("engine", "n_markets", "total_bets", "volume",
                     "fee_revenue", "eip_mean", "epp_mean", "epp_plus_fee",
                     "rejection_rate")))
    return 0


def cmd_probe(args) -> int:
    run_all = not (args.continuity or args.properties)
    status = 0
    if args.properties or run_all:
        rep = property_report()
        print(f"liquidity properties over {rep.n_states} random states "
              f"(tolerance {PROPERTY_TOLERANCE:g} relative):")
        print(f"  add additivity      max rel err {rep.max_add_additivity:.3e}")
        print(f"  remove additivity   max rel err {rep.max_remove_additivity:.3e}")
        print(f"  add reversibility   max rel err {rep.max_add_reversibility:.3e}")
        print(f"  remove reversibility max rel err {rep.max_remove_reversibility:.3e}")
        if rep.max_error > PROPERTY_TOLERANCE:
            print("  FAIL: tolerance exceeded")
            status = 2
    if args.continuity or run_all:
        rep = continuity_report()
        print("swap branch-boundary continuity grid (report only):")
        for rho, d_in, gap in rep.rows:
            print(f"  rho={rho:<5g} d_in={d_in:<6g} boundary gap {gap:.6e}")
        print(f"  max gap {rep.max_gap:.6e} "
              "(nonzero for rho != 1 by construction of the printed formula)")
    return status


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "quote":
            return cmd_quote(args)
        if args.command == "simulate":
            return cmd_simulate(args)
        return cmd_probe(args)
    except (UsageError, ConfigError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except UnfillableQuote as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
