"""Sum-capacity sandwich as the number of users grows."""

# %%
from ehmac import regions as rg

for name, gamma in [("receiver knows arrivals", rg.gap_txrx()),
                    ("correlated, transmitter only", rg.gap_tx_correlated())]:
    print(f"\n{name}: gap {gamma:.4f} bits")
    for r in rg.gap_report(gamma, 1.0, [4 ** k for k in range(11)]):
        print(f"K={r.K:>8}  upper={r.upper:8.4f}  lower={r.lower:8.4f}  relative={r.relative:.4f}")

# %% Independent arrivals without receiver side information pay K bits.
for K in (1, 2, 8, 32):
    print(f"K={K}: gap {rg.gap_tx(K):.3f}")
