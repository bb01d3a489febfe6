"""Factor a positive martingale into parity-restricted parts.

Any strictly positive martingale splits as root * odd_part * even_part,
where the odd part only moves money at odd-length states and the even
part at even-length states. Run:

    python3 demos/parity_split.py
"""

from fractions import Fraction

from paritybet import Kind, StrategyTable, parity_factorize, validate

m = StrategyTable(3, {
    "": Fraction(1),
    "0": Fraction(3, 2), "1": Fraction(1, 2),
    "00": Fraction(2), "01": Fraction(1),
    "10": Fraction(1, 4), "11": Fraction(3, 4),
    "000": Fraction(3), "001": Fraction(1),
    "010": Fraction(1, 2), "011": Fraction(3, 2),
    "100": Fraction(1, 8), "101": Fraction(3, 8),
    "110": Fraction(1), "111": Fraction(1, 2),
}, Kind.MARTINGALE)

odd, even = parity_factorize(m)

print("input root:", m.value(""))
print()
print(f"{'state':>6}  {'M':>6}  {'odd':>6}  {'even':>6}  product")
for s in sorted(m.values, key=lambda t: (len(t), t)):
    prod = m.value("") * odd.value(s) * even.value(s)
    print(f"{s or 'root':>6}  {str(m.value(s)):>6}  {str(odd.value(s)):>6}  "
          f"{str(even.value(s)):>6}  {prod}")
    assert prod == m.value(s)

d_odd, d_even = validate(odd), validate(even)
print()
print("odd part:", "martingale" if d_odd.martingale else "NOT a martingale",
      "| bets on odd:", d_odd.bets_on_odd)
print("even part:", "martingale" if d_even.martingale else "NOT a martingale",
      "| bets on even:", d_even.bets_on_even)
