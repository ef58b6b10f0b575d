# %% [markdown]
# # A tunable admittance network as a matrix-vector multiplier
#
# A network with N driven and M undriven ports is described by its grid of
# tunable admittances. Driving the first N ports with sources u puts
# voltages v2 on the others, and v2 is linear in u.

# %%
import numpy as np

from milac.network import (
    PartitionedP,
    admittance_matrix,
    components_from_p,
    dumps_network,
    p_matrix,
    simulate_blockwise,
    simulate_nodal,
)

rng = np.random.default_rng(0)

# %% [markdown]
# Two ports, one of each kind. The grid holds port-to-ground admittances
# on its diagonal and port-to-port ones elsewhere.

# %%
comps = np.array([[1.0, 3.0], [3.0, 2.0]])
from milac.network import MilacNetwork

net = MilacNetwork(1, 1, 1.0, comps)
print(admittance_matrix(net).real)
print(p_matrix(net).full.real)

# %% [markdown]
# Going the other way: pick P, solve for the components, and check the
# output against the block formulas.

# %%
n, m = 3, 4
p = PartitionedP.from_full(rng.standard_normal((n + m, n + m)) + 1j * rng.standard_normal((n + m, n + m)), n)
net = components_from_p(p, y0=0.02)
u = rng.standard_normal((n, 1)) + 0j
v1, v2 = simulate_nodal(net, u)
for variant in ("p11", "p22"):
    w1, w2 = simulate_blockwise(p, u, variant)
    print(variant, np.max(np.abs(w2 - v2)))

# %% [markdown]
# Networks serialize to a plain text listing of their components.

# %%
print("\n".join(dumps_network(components_from_p(PartitionedP([[1]], [[0]], [[-2]], [[1]]), 1.0)).splitlines()))
