# %% [markdown]
# # Operation counts per coherence block
#
# Exact counts for zero-forcing, matched filtering and the DFT with
# tau = 100 symbols per block.

# %%
from milac.complexity import ComplexityModel, Realization, Task, dft_saving, gain, ops_per_block

for n in (64, 512, 4096, 8192):
    zf = gain(Task.ZERO_FORCING, n, 100)
    mf = gain(Task.MATCHED_FILTERING, n, 100)
    print(f"N={n:5d}  ZF gain {float(zf):9.1f}  MF gain {mf}  DFT saving {int(dft_saving(n, 100)):,}")

# %% [markdown]
# A network at 4096 x 4096 against digital at 256 x 256.

# %%
big = ops_per_block(ComplexityModel(Task.ZERO_FORCING, Realization.MILAC, n_r=4096, tau=100))
small = ops_per_block(ComplexityModel(Task.ZERO_FORCING, Realization.DIGITAL, n_r=256, tau=100))
print(f"{int(big):,} vs {float(small):,.0f} ops, ratio {float(small / big):.2f}")
