"""Integer duel: the unit engine outruns a family of integer adversaries.

Greedy mode plays the engine's favored bit unless the adversaries'
aggregate wager leans against it; every deviation burns at least one
unit of aggregate adversary capital, so the engine eventually runs free.

    python3 demos/duel.py
"""

from paritybet import (
    IntStrategy,
    IntegerBet,
    Parity,
    constant_program,
    diagonalize,
    replay_trace,
    unit_bet_on_one,
)

adversaries = [
    IntStrategy(constant_program(4, IntegerBet(1, 1), Parity.BETS_ON_ODD), "odd-ones"),
    IntStrategy(constant_program(6, IntegerBet(1, 0), Parity.BETS_ON_EVEN), "even-zeros"),
]
engine = unit_bet_on_one()

trace = diagonalize(adversaries, engine, target=40)

print("emitted:", trace.z[:48], "..." if len(trace.z) > 48 else "")
print("bits:", len(trace.z), "| reached target:", trace.reached)
print()
print("first 12 steps (bit, rule, engine, adversaries):")
for rec in trace.records[:12]:
    print(f"  {rec.bit}  {rec.rule:>8}  {rec.engine:>3}  {rec.adversaries}")

deviations = sum(1 for r in trace.records if r.rule == "deviate")
print()
print("deviations:", deviations,
      "(bounded by the aggregate initial adversary capital, 10)")

replay_trace(trace, engine, adversaries)
print("replay from scratch: every capital matches")
