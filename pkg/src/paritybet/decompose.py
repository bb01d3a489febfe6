"""Splitting martingales across the two bet parities.

A positive martingale factors exactly into the product of its odd-step
ratios and its even-step ratios; each ratio product is itself a martingale
that bets at only one parity. On a single two-bit block we also build the
pointwise-least martingale that bets only on the second bit while reaching
prescribed values on the two leaves whose second bit is 0, and the induced
decomposition of a pair of block strategies into that minimal core plus
nonnegative remainders.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from . import bits
from .errors import PreconditionError
from .strategy import (
    Kind,
    Parity,
    Sided,
    StrategyTable,
    as_capital,
    validate,
)


def parity_factorize(m: StrategyTable) -> tuple[StrategyTable, StrategyTable]:
    """Factor a martingale as value(root) * odd_part * even_part.

    Both factors start at 1. The odd part collects the conditional ratios
    of steps taken from odd-length states (so it bets at odd states); the
    even part collects the steps from even-length states. Their product
    times the root value reproduces the input exactly.

    Zero handling: once the input hits 0, the factor whose step caused the
    zero carries a 0 forever (its own zero-propagation), while the other
    factor simply stops betting; the conditional ratio inside a dead cone
    is taken to be 1. This keeps both factors exact martingales of their
    parity and preserves the product identity.
    """
    diag = validate(m)
    if not diag.martingale:
        raise PreconditionError(
            f"parity_factorize needs a martingale; law fails at "
            f"{diag.witnesses.get('martingale')!r}"
        )
    odd_part: dict[str, Fraction] = {bits.EMPTY: Fraction(1)}
    even_part: dict[str, Fraction] = {bits.EMPTY: Fraction(1)}
    for state in bits.all_states(m.depth):
        if state == bits.EMPTY:
            continue
        parent = state[:-1]
        pv = m.value(parent)
        if pv == 0:
            ratio = Fraction(1)  # inside a dead cone neither factor bets
        else:
            ratio = m.value(state) / pv
        if len(parent) % 2 == 1:
            odd_part[state] = odd_part[parent] * ratio
            even_part[state] = even_part[parent]
        else:
            even_part[state] = even_part[parent] * ratio
            odd_part[state] = odd_part[parent]
    e = StrategyTable(m.depth, odd_part, Kind.MARTINGALE, Parity.BETS_ON_ODD)
    o = StrategyTable(m.depth, even_part, Kind.MARTINGALE, Parity.BETS_ON_EVEN)
    return e, o


def min_block_martingale(m00, m10) -> StrategyTable:
    """Least second-bit-only martingale reaching m00 at 00 and m10 at 10.

    The strategy may bet only on the second bit of the two-bit block, so
    its root and both length-1 values agree. The cheapest root is
    max(m00, m10) / 2: the larger target is funded exactly, and whatever
    the doubled root leaves over lands on the sibling of the smaller one.
    Pointwise minimal among all such strategies meeting the two targets.
    """
    a = as_capital(m00)
    b = as_capital(m10)
    root = max(a, b) / 2
    vals = {
        "": root,
        "0": root,
        "1": root,
        "00": a,
        "10": b,
        "01": 2 * root - a,
        "11": 2 * root - b,
    }
    return StrategyTable(2, vals, Kind.MARTINGALE, Parity.BETS_ON_ODD)


@dataclass(frozen=True)
class BlockSpec:
    """Recorded two-bit-block data: leaf targets for the second-bit
    strategy, level-1 targets for the first-bit strategy, and the budget
    the pair must not exceed."""

    m00: Fraction
    m10: Fraction
    n0: Fraction
    n1: Fraction
    c: Fraction

    def __post_init__(self):
        for name in ("m00", "m10", "n0", "n1", "c"):
            object.__setattr__(self, name, as_capital(getattr(self, name)))


def unique_first_bit_martingale(n0, n1) -> StrategyTable:
    """The only first-bit-only martingale on the block with the given
    level-1 values: root is their average and level 2 changes nothing."""
    a = as_capital(n0)
    b = as_capital(n1)
    vals = {
        "": (a + b) / 2,
        "0": a,
        "1": b,
        "00": a,
        "01": a,
        "10": b,
        "11": b,
    }
    return StrategyTable(2, vals, Kind.MARTINGALE, Parity.BETS_ON_EVEN)


def block_decompose(
    m: StrategyTable, n: StrategyTable, spec: BlockSpec
) -> tuple[StrategyTable, StrategyTable, StrategyTable, StrategyTable]:
    """Split a block pair into minimal cores plus nonnegative remainders.

    m must bet only on the second bit and reach at least the spec's leaf
    targets; n must bet only on the first bit and reach at least the
    level-1 targets. Returns (m_core, m_rest, n_core, n_rest) with
    m == m_core + m_rest and n == n_core + n_rest pointwise, remainders
    nonnegative martingales of the matching parity.
    """
    for t, parity_tag in ((m, Parity.BETS_ON_ODD), (n, Parity.BETS_ON_EVEN)):
        if t.depth != 2:
            raise PreconditionError("block_decompose works on depth-2 tables")
        diag = validate(t)
        if not diag.holds(Kind.MARTINGALE, parity_tag, Sided.NONE):
            raise PreconditionError(
                f"input does not satisfy martingale/{parity_tag.value}; "
                f"witnesses {dict(diag.witnesses)}"
            )
    if m.value("00") < spec.m00 or m.value("10") < spec.m10:
        raise PreconditionError("m does not reach the spec's leaf targets")
    if n.value("0") < spec.n0 or n.value("1") < spec.n1:
        raise PreconditionError("n does not reach the spec's level-1 targets")
    m_core = min_block_martingale(spec.m00, spec.m10)
    n_core = unique_first_bit_martingale(spec.n0, spec.n1)
    m_rest_vals = {s: m.value(s) - m_core.value(s) for s in bits.all_states(2)}
    n_rest_vals = {s: n.value(s) - n_core.value(s) for s in bits.all_states(2)}
    # Exceeding a target at 00/10 can push the core's complementary leaf
    # above the input's; the remainder then fails to exist as a nonnegative
    # strategy. Targets hit with equality never trigger this.
    for label, rest in (("m", m_rest_vals), ("n", n_rest_vals)):
        for state in bits.all_states(2):
            if rest[state] < 0:
                raise PreconditionError(
                    f"no nonnegative remainder: {label} falls below its "
                    f"core by {-rest[state]} at state {state!r}"
                )
    m_rest = StrategyTable(2, m_rest_vals, Kind.MARTINGALE, Parity.BETS_ON_ODD)
    n_rest = StrategyTable(2, n_rest_vals, Kind.MARTINGALE, Parity.BETS_ON_EVEN)
    return m_core, m_rest, n_core, n_rest
