"""
Figure-eight saddle census.

For p in {-6, 6, -8, 8, 10}:
1. Solve the stationary system and count solutions (expected |p|)
2. Compute (6/pi^2) sum T and its distance to Z
3. Save one CSV row per p and the per-solution table
"""
import os
import sys

import mpmath
import pandas as pd
from tqdm import tqdm

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from csrec.config import Settings
from csrec.verify import check_fig8

HERE = os.path.dirname(os.path.abspath(__file__))
SURGERIES = [-6, 6, -8, 8, 10]

print("=" * 80)
print("FIGURE-EIGHT SADDLE CENSUS")
print("=" * 80)

settings = Settings.from_env()
print(f"\nPrecision: {settings.precision} bits ({settings.digits} digits)")

summary = []
tables = []
for p in tqdm(SURGERIES, desc="surgeries"):
    with mpmath.mp.workprec(settings.precision):
        report = check_fig8(p, settings)
    frame = report.to_frame()
    frame.insert(2, 'p', p)
    tables.append(frame)
    summary.append({
        'p': p,
        'solutions': len(report.rows),
        'scaled_sum': report.scaled,
        'distance': report.distance,
        'imag': report.imag,
        'passed': report.passed,
        'notes': '; '.join(report.notes),
    })

print("\nResults:")
for row in summary:
    marker = "✓" if row['passed'] else "❌"
    count_marker = "" if row['solutions'] == abs(row['p']) else "  ⚠ count"
    print(f"   {marker} p={row['p']:>4}  solutions={row['solutions']:>3}  "
          f"distance={row['distance']:.2e}  |Im|={row['imag']:.2e}{count_marker}")

pd.DataFrame(summary).to_csv(os.path.join(HERE, 'fig8_census.csv'), index=False)
pd.concat(tables, ignore_index=True).to_csv(os.path.join(HERE, 'fig8_solutions.csv'), index=False)
print("\n✓ Saved fig8_census.csv and fig8_solutions.csv")
