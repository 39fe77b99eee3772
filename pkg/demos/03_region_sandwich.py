"""Three users: outer bound, throughput region, and the inner bound between them."""

# %%
import itertools

import numpy as np

from ehmac import PolicySpec, build_iid_product, throughput_set_function
from ehmac import regions as rg
from ehmac.arrivals import bernoulli

model = build_iid_product([bernoulli(0.3, 4), bernoulli(0.5, 4), bernoulli(0.7, 4)], [4, 4, 4])
outer = rg.awgn_outer(model.means)
tput = throughput_set_function(PolicySpec.fixed_fraction(), model, 8)
inner = rg.inner_txrx(tput)

# %%
print(f"{'subset':>8} {'outer':>7} {'T_8':>7} {'inner':>7}")
for mask in range(1, 8):
    users = "".join(str(i + 1) for i in rg.members(mask, 3))
    print(f"{users:>8} {outer.f.values[mask]:7.4f} {tput.values[mask]:7.4f} {inner.f.values[mask]:7.4f}")

# %% Containment and polymatroid structure.
print("inner in T:", rg.region_contains(inner, tput), " T in outer:", rg.region_contains(tput, outer))
print("T submodular:", rg.is_submodular(tput), " inner clamped:", inner.clamped)

# %% Corner points of the throughput region (Edmonds vertices).
for perm in itertools.permutations(range(3)):
    v = rg.vertex(tput, perm)
    print([p + 1 for p in perm], np.round(v, 4), round(v.sum(), 6))
print("sum rate:", rg.sum_rate(tput), " sup-distance to outer:", rg.setfn_distance(tput, outer))
