"""Run the stage machine against a staged parity pair and show the
description ledger staying within Kraft weight 1.

    python3 demos/tower.py
"""

from fractions import Fraction

from paritybet import (
    Component,
    FractionBet,
    Kind,
    Parity,
    StageApprox,
    capital_threshold,
    constant_program,
    follow_program,
    params,
    run_stage_machine,
)

n_side = StageApprox((
    Component(0, Fraction(1, 8),
              constant_program(1, FractionBet(Fraction(1, 8)), Parity.BETS_ON_ODD)),
    Component(3, Fraction(1, 16),
              constant_program(1, None, Parity.BETS_ON_ODD)),
    Component(50, Fraction(1),
              follow_program("0" * 18, Parity.BETS_ON_ODD, Fraction(385, 262144))),
), Kind.MARTINGALE, Parity.BETS_ON_ODD)

t_side = StageApprox((
    Component(0, Fraction(1, 8),
              constant_program(1, None, Parity.BETS_ON_EVEN)),
    Component(7, Fraction(1, 16),
              constant_program(1, FractionBet(Fraction(-1, 4)), Parity.BETS_ON_EVEN)),
), Kind.MARTINGALE, Parity.BETS_ON_EVEN)

state, deepest, ledger = run_stage_machine(n_side, t_side, 2000, 2)

print("index parameters:")
for n in range(3):
    pr = params(n)
    print(f"  n={n}: q={pr.q} p={pr.p} s={pr.s} "
          f"described_len={pr.described_len} "
          f"capital budget {capital_threshold(n)}")

print()
print("event log:")
for e in state.events:
    shown = e.value if len(e.value) <= 30 else e.value[:27] + "..."
    print(f"  stage {e.stage:>4}  {e.kind:>8}  n={e.n}  {shown}")

print()
print("deepest defined prefix:", len(deepest), "bits")
print("prefix changes per index:", state.change_counts)
print("ledger Kraft weight:", ledger.kraft_weight(),
      f"(~{float(ledger.kraft_weight()):.3g})")
print("request lengths:", sorted({ln for _, ln in ledger.requests}))
