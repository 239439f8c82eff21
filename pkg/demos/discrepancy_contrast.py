"""
Uniform from the start, clustered along the strings
===================================================

The fractional parts of alpha * p_n look uniform over the first ten
thousand primes.  Started at one of the prime strings they pile up near a
single point.  The star discrepancy makes the contrast measurable.
"""

# %%
from pathlib import Path
import tempfile

from welldist.construction import build, relaxed_default
from welldist.distribution import window_profile
from welldist.report import prime_source, write_report

state = build(relaxed_default())
primes = prime_source(state)

# %%
windows = [(0, 10_000), (0, 256)] + [(s.m, s.length) for s in state.stages] + [(s.m, 256) for s in state.stages]
for r in window_profile(state.alpha, 1, primes, windows, state.tail_bound):
    print(f"m={r.m:<9} N={r.N:<6} D*={r.d_star:.5f}")

# %%
# Past the four primes of a string the points spread out again quickly,
# which is why the effect is only visible at a supremum over shifts.
out = Path(tempfile.mkdtemp()) / "report"
summary = write_report(state, out, h_max=4)
print("report in", out, "; verification", summary["verification"])
print((out / "criterion_profile.csv").read_text())
