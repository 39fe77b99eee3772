"""Entropy rate of the spend process, the price of not telling the receiver the arrivals."""

# %%
import numpy as np

from ehmac import PolicySpec, build_fully_correlated, build_iid_product, throughput_set_function
from ehmac import regions as rg
from ehmac.arrivals import bernoulli
from ehmac.policies import output_entropy_profile

model = build_iid_product([bernoulli(0.5)], [1])
for pol in (PolicySpec.greedy(), PolicySpec.fixed_fraction(), PolicySpec.quantized_fixed_fraction(2)):
    prof = output_entropy_profile(pol, model, 8)
    print(f"{pol.variant:>26}: H(G^n)/n =", np.round(prof, 4))

# %% Independent users add their entropies; identical arrivals do not.
marg = {0: 0.5, 1: 0.5}
indep = build_iid_product([marg, marg], [1, 1])
corr = build_fully_correlated(marg, 2, 1)
pol = PolicySpec.fixed_fraction()
print("independent:", output_entropy_profile(pol, indep, 6)[-1])
print("correlated: ", output_entropy_profile(pol, corr, 6)[-1])

# %% The transmitter-only inner bound pays the entropy rate on top of the EPI constant.
# (a strong harvester, so the bound does not clamp at zero)
strong = build_fully_correlated({0: 0.5, 64: 0.5}, 2, 64)
tput = throughput_set_function(pol, strong, 6)
for h in (0.0, output_entropy_profile(pol, strong, 6)[-1]):
    print(f"entropy {h:.3f}: inner sum bound {rg.inner_tx(tput, h).f.values[-1]:.4f}")
