"""Battery dynamics under three policies on the same arrival path."""

# %%
import numpy as np

from ehmac import PolicySpec, build_iid_product, simulate_trajectory
from ehmac.arrivals import bernoulli

model = build_iid_product([bernoulli(0.3, high=2.0)], [2.0])
print(model, "mean arrival", model.means[0])

# %% Same seed, so every policy sees the same arrivals.
for pol in (PolicySpec.fixed_fraction(), PolicySpec.greedy(), PolicySpec.constant(0.25)):
    tr = simulate_trajectory(model, pol, 12, seed=3)
    print(f"\n{pol.variant}")
    print("arrival", np.round(tr.arrivals[0], 3))
    print("level  ", np.round(tr.levels[0], 3))
    print("spend  ", np.round(tr.spends[0], 3))

# %% Fixed fraction keeps a reserve: after a burst it keeps spending q * b
# for several slots instead of draining at once.
tr = simulate_trajectory(model, PolicySpec.fixed_fraction(), 5, seed=3)
print("\n" + tr.to_csv())
