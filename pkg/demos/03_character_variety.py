# %% [markdown]
# Vol M_{1,1}(i theta) by integrating over a fundamental domain of the trace coordinates.

# %%
import math

import numpy as np

from wpvol.charvar import (
    apply_word,
    closed_form_final,
    kappa,
    monte_carlo_raw,
    reduce_to_domain,
    theta_to_kappa,
    volume_integral,
)

p = (6.0, 3.0, 15.0)
print("kappa", kappa(p), "->", reduce_to_domain(p))
q = apply_word([1, 3, 2, 1], (3.0, 3.0, 3.0))
print(q, reduce_to_domain(q))

# %%
for theta in np.linspace(0, 2 * math.pi, 7)[:-1]:
    res = volume_integral(theta)
    print(f"theta={theta:5.3f} kappa={theta_to_kappa(theta):+.3f} "
          f"quad={res.final:.12f} closed={closed_form_final(theta):.12f}")

# %% [markdown]
# Plain Monte Carlo agrees, though the density is only just integrable at the corner.

# %%
mean, se = monte_carlo_raw(1.0, samples=10 ** 6, seed=2)
print(mean, "+/-", se, "vs", volume_integral(1.0).raw)
