"""Fixed-fraction throughput against the AWGN capacity at the mean arrival power."""

# %%
import itertools
import math

from ehmac import PolicySpec, build_iid_product, exact_throughput, mc_throughput
from ehmac.arrivals import bernoulli
from ehmac.regions import FIXED_FRACTION_GAP

print(f"{'p':>4} {'cap':>4} {'awgn':>7} {'T_12':>7} {'T_1e5':>7} {'gap':>6}")
for p, cap in itertools.product([0.1, 0.5, 0.9], [1, 5, 25]):
    model = build_iid_product([bernoulli(p, high=cap)], [cap])
    awgn = 0.5 * math.log2(1 + p * cap)
    short = exact_throughput(PolicySpec.fixed_fraction(), model, [0], 12).value
    long = mc_throughput(PolicySpec.fixed_fraction(), model, [0], 100_000, paths=4, seed=1).value
    print(f"{p:4} {cap:4} {awgn:7.4f} {short:7.4f} {long:7.4f} {awgn - long:6.3f}")

# %% The long-horizon gap stays below the constant.
print("gap constant:", FIXED_FRACTION_GAP)

# %% Greedy spending instead of fixed fraction, for contrast.
model = build_iid_product([bernoulli(0.1, high=25)], [25])
g = mc_throughput(PolicySpec.greedy(), model, [0], 100_000, paths=4, seed=1)
f = mc_throughput(PolicySpec.fixed_fraction(), model, [0], 100_000, paths=4, seed=1)
print(f"p=0.1, cap=25: greedy {g.value:.4f}  fixed fraction {f.value:.4f}")
