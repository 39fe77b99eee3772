"""Uniform inputs over unit-variance Gaussian noise lose at most 1/2 log2(pi e / 2) bits."""

# %%
from ehmac import gaussmi as gm

print(f"{'P':>6} {'mi':>8} {'floor':>8} {'ceiling':>8} {'loss':>7}")
for P in (0.25, 1, 4, 16, 64, 256, 1024):
    mi = gm.sum_uniform_awgn_mi([P])
    print(f"{P:6} {mi:8.5f} {gm.epi_lower_bound(P):8.5f} {gm.gaussian_ceiling(P):8.5f} "
          f"{gm.gaussian_ceiling(P) - mi:7.4f}")
print("constant:", gm.EPI_CONSTANT)

# %% Several users: the sum of uniforms is closer to Gaussian, so the loss shrinks.
for K in (1, 2, 3, 4):
    mi = gm.sum_uniform_awgn_mi([16 / K] * K)
    print(f"K={K}: mi={mi:.5f}  loss={gm.gaussian_ceiling(16) - mi:.4f}")

# %% Binary inputs saturate at one bit.
for a in (0.5, 1, 2, 4):
    print(f"+-{a}: {gm.mixture_awgn_mi([-a, a], [0.5, 0.5]):.5f}")
