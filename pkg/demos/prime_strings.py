"""
Strings of consecutive primes in one residue class
==================================================

The construction needs runs of consecutive primes that all sit in the
class 1 modulo a power of two.  This script looks at how quickly such runs
thin out as the modulus and the run length grow.
"""

# %%
from welldist.prime_engine import sieve
from welldist.run_finder import SearchBudget, enumerate_runs, find_first_run

table = sieve(10**7)
print(f"{table.count} primes below 10^7")

# %%
# First runs of length k modulo 2**j, searched among primes below 10^7.
# Empty cells mean the search ran out of primes.
budget = SearchBudget(10**7)
print("j \\ k" + "".join(f"{k:>12}" for k in range(1, 6)))
for j in range(1, 6):
    cells = []
    for k in range(1, 6):
        r = find_first_run(k, 2**j, 1, budget, table)
        cells.append(f"{r.first_prime:>12}" if r else f"{'-':>12}")
    print(f"{j:<5}" + "".join(cells))

# %%
# How many maximal runs of length >= 3 modulo 16 are there?  The count is
# small, and runs of length 12 modulo 4096 are far beyond reach.
runs = list(enumerate_runs(3, 16, 1, budget, table))
print(len(runs), "runs of length >= 3 modulo 16; longest:", max(r.k for r in runs))

# %%
# Modulo 4096 we ask for twelve consecutive primes.  None exist below 10^7
# and the search reports where it stopped.
print(find_first_run(12, 4096, 1, budget, table).to_json())
