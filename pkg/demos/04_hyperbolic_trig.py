# %% [markdown]
# Distances between boundary components and cone points.

# %%
import math

from wpvol.chambers import BoundaryLabel
from wpvol.hypgeom import (
    crown_length,
    crown_spurious_root,
    hexagon_bound,
    hexagon_delta,
    pentagon_delta,
    quad_delta,
    separation_bound,
)

for c in [0.0, 1.0, 4.0]:
    print("hexagon c=%.1f" % c, hexagon_delta(2, 2, c), ">=", hexagon_bound(2, 2))
print("pentagon", pentagon_delta(2, math.pi / 2))
print("quad", quad_delta(math.pi / 2, math.pi / 2))

# %%
cone, geo = BoundaryLabel.cone, BoundaryLabel.geodesic
print(separation_bound(geo(2.0), cone(1.0)), separation_bound(geo(2.0), cone(4.0)))

# %% [markdown]
# Crown: the boundary length tends to L as the corner opens to pi.

# %%
for phi in [2.0, 3.0, math.pi - 1e-4]:
    print(phi, crown_length(phi, 2.0))
print("corner-independent root:", crown_spurious_root(2.0))
