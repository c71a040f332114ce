import sys
from decimal import Decimal

ZERO = Decimal("0.000000")

_config = None


def pytest_configure(config):
    global _config
    _config = config


def conservation_gap(market):
    """Largest deviation from holdings + pool == locked, across outcomes."""
    ledger = market.ledger
    gaps = []
    for k in market.spec.outcomes:
        total = sum(
            (ledger._bal[a].get(k, ZERO) for a in ledger._bal), ZERO
        ) + market.pool.r[k]
        gaps.append(abs(total - ledger.locked))
    return max(gaps)


def assert_conserved(market):
    gap = conservation_gap(market)
    assert gap == 0, f"conservation broken by {gap}"


def announce(number, name, ok, detail=""):
    """One terminal-visible pass/fail line per acceptance criterion."""
    status = "PASS" if ok else "FAIL"
    suffix = f" ({detail})" if detail else ""
    line = f"criterion {number:2d} {name}: {status}{suffix}"
    reporter = (
        _config.pluginmanager.get_plugin("terminalreporter") if _config else None
    )
    if reporter is not None:
        # bypasses output capture so the line lands in the terminal report
        reporter.write_line("")
        reporter.write_line(line)
    else:
        sys.__stdout__.write(line + "\n")
        sys.__stdout__.flush()
    assert ok, f"criterion {number} {name} failed{suffix}"
