"""
A desk-scale alpha with a non-vanishing shifted Weyl sum
========================================================

Build alpha from three strings of four consecutive primes that are all
1 modulo 32, then check with certified error bounds that the normalized
exponential sum taken at each string stays within 1/pi_k of 1.

The build scans primes up to about 6.2e8 and takes a few seconds.
"""

# %%
from welldist import analysis
from welldist.construction import build, liouville_records, relaxed_default
from welldist.report import prime_source, verification

params = relaxed_default()
state = build(params)
for s in state.stages:
    print(f"k={s.k}  n_k={s.n:<6} m_k={s.m:<9} string={s.run.first_prime}..{s.pi}")

# %%
# Only the leading digit 2**-5 is cancelled exactly by primes = 1 (mod 32).
# The later digits sit so far out that h * alpha * (p - 1) moves by far
# less than pi_k**-2 for every h <= 16.
primes = prime_source(state)
rep = analysis.verify_lemma22(state, 16, 2, primes)
for c in rep["checks"]:
    print(c.i, c.status, "log2 of the distance bound:", c.detail["log2_upper"])

# %%
# The sandwich: the Weyl sum at shift m_k has magnitude above 1 - 1/pi_k.
for s in state.stages:
    r = analysis.verify_sandwich(state, 1, s.k, s.length, primes)
    print(f"k={s.k}: |S| = {r['weyl']['magnitude']!r} +- {r['weyl']['total_error_bound']:.1e}, status {r['summary']}")

# %%
# Everything at once, for h = 1..16.
print(verification(state, params.h_max, primes)["totals"])

# %%
# The digit gaps here are far too small for the Liouville inequality past
# the first stage, so this alpha carries no transcendence certificate.
for rec in liouville_records(state):
    print(rec.k, "holds" if rec.holds else "fails", "log2 gap bound", rec.gap_bound.log2_upper())
