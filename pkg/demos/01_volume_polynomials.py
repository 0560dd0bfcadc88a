# %% [markdown]
# Volume polynomials from the recursion, and their 2 pi limit.

# %%
from wpvol import volume, volume_table_up_to
from wpvol.exactpoly import PI2, substitute_square

table = volume_table_up_to(4)
for key in [(0, 3), (1, 1), (0, 4), (1, 2), (2, 0)]:
    print(key, table.get(*key).to_text())

# %% [markdown]
# A cone angle theta enters as L = i theta, i.e. L^2 = -theta^2.
# At theta = 2 pi the last boundary drops out.

# %%
v12 = table.get(1, 2)
print("V_{1,2}(L, 2 pi i) =", substitute_square(v12, 2, -4 * PI2).to_text())
print("V_{1,1}(L)        =", table.get(1, 1).to_text())

# %%
v05 = volume(0, 5)
for _ in range(4):
    v05 = substitute_square(v05, 1, 0)
print("V_{0,5}(0,0,0,0,L) =", v05.to_text())
print("vanishes at 2 pi i:", substitute_square(v05, 1, -4 * PI2).is_zero())
