# %% [markdown]
# # Linear estimators computed by the network
#
# For y = H x + n, every estimator below has a P matrix whose network
# returns the estimate on its undriven ports when driven with y.

# %%
import numpy as np

from milac.complexity import estimator_counts
from milac.estimators import Kind, ObservationModel, Sign, build_p, estimate_analog, estimate_digital

rng = np.random.default_rng(1)


def crandn(*shape):
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2)


ny, nx = 8, 5
a, b = crandn(nx, nx), crandn(ny, ny)
model = ObservationModel(crandn(ny, nx), a @ a.conj().T + np.eye(nx), b @ b.conj().T + np.eye(ny), lam=0.3)
y = crandn(ny, 1)

# %%
for kind in Kind:
    ref = estimate_digital(model, kind, y)
    errs = [np.linalg.norm(estimate_analog(model, kind, y, sign=s) - ref) / np.linalg.norm(ref) for s in Sign]
    print(f"{kind.value:6s} relative error {max(errs):.1e}")

# %% [markdown]
# The OLS network with ``form=2`` needs H H^H invertible, which fails for a
# tall H. The code never picks a form on its own.

# %%
print(build_p(model, Kind.OLS, form=1).full.shape)

# %% [markdown]
# Configuration cost versus digital evaluation (real operations).

# %%
for kind in Kind:
    net_ops, dig_ops = estimator_counts(kind, 64, 64)
    print(f"{kind.value:6s} network {int(net_ops):>8d}  digital {float(dig_ops):12.0f}")
