# %% [markdown]
# # Multi-user precoders, digital and in the network
#
# A reduced-size version of the 4x4 sum-rate comparison. The full run is
# ``milac sumrate --config configs/sumrate.cfg``.

# %%
import numpy as np

from milac.linksim import LinkConfig, run_sumrate_experiment

cfg = LinkConfig(n_t=4, n_r=4, snr_db=(-10, 0, 10, 20, 30), trials=300, seed=1)
labels = [f"{r}/{p}" for r in ("digital", "milac-arbit", "milac-lmmse") for p in ("R-ZFBF", "ZFBF", "MBF")]
res = run_sumrate_experiment(cfg, labels)

# %%
print("snr_db  " + "  ".join(f"{s:>6.0f}" for s in cfg.snr_db))
for lab in labels:
    print(f"{lab:20s}" + "  ".join(f"{v:6.2f}" for v in res.rates[lab].mean(axis=0)))

# %% [markdown]
# A network set from a digitally computed precoder reproduces it exactly, so
# its rates equal the digital ones trial by trial.

# %%
print(np.max(np.abs(res.rates["milac-arbit/R-ZFBF"] - res.rates["digital/R-ZFBF"])))

# %% [markdown]
# A network that computes the precoder itself can only scale the whole
# matrix, so its beams share one power constraint instead of one per user.
# That helps at low SNR and costs a little at high SNR.

# %%
ratio = res.rates["milac-lmmse/R-ZFBF"].mean(axis=0) / res.rates["digital/R-ZFBF"].mean(axis=0)
print(np.round(ratio, 3))
