# %% [markdown]
# Evaluating at cone angles: where the polynomial is a volume and where it goes negative.

# %%
import math

from wpvol import classify_validity, parse_labels, volume
from wpvol.chambers import find_negative_example, positivity_scan
from wpvol.exactpoly import numeric_eval

labels = parse_labels("cusp, cusp, 1.9pi i")
print(classify_validity(1, labels).to_dict()["validity"], numeric_eval(volume(1, 3), labels))

# %%
labels, value = find_negative_example(theta=2.0, eps=0.1)
report = classify_validity(0, labels)
print("V_{0,4} =", value)
print("verdict:", report.validity.value, "| nonempty:", report.nonempty)
print("mergeable:", report.mergeable_subsets)

# %% [markdown]
# Inside the main chamber every sample stays positive.

# %%
for g, n in [(0, 4), (0, 5), (1, 2), (1, 3)]:
    rep = positivity_scan(g, n, samples=5000, seed=1)
    print((g, n), "min", round(rep.min_value, 4), "at", [round(t / math.pi, 3) for t in rep.argmin], "pi")
