"""Fixed-point collateral arithmetic.

Token balances follow the 6-fractional-digit stablecoin convention.  All
ledger mutations happen in this representation so that conservation
invariants can be checked with exact equality, never with a tolerance.
Decimal addition/subtraction/multiplication is exact at these scales; only
values produced by division or by float-valued pricing math need to pass
through :func:`amount` before they touch a balance.
"""

from decimal import Decimal, ROUND_HALF_EVEN

PRECISION = Decimal("0.000001")
ZERO = Decimal("0.000000")


def amount(value) -> Decimal:
    """Coerce ``value`` to a 6-decimal fixed-point Decimal."""
    if isinstance(value, Decimal):
        d = value
    elif isinstance(value, float):
        d = Decimal(value)
    else:
        d = Decimal(str(value))
    return d.quantize(PRECISION, rounding=ROUND_HALF_EVEN)
