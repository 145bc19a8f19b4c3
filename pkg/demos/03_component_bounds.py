# %% [markdown]
# Distributionally robust bounds for one uncertain quantity: how the
# narrowest interval with worst-case violation probability below a budget
# widens with the Wasserstein radius.

# %%
import numpy as np

from drlaed.bounds import build_box, solve_component_bounds, worst_case_violation
from drlaed.evaluation import box_escape_fraction, solar_samples
from drlaed.risk import AmbiguitySpec

rng = np.random.default_rng(0)
w = np.sort(rng.gamma(4.0, 25.0, 20))
print("samples:", np.round(w, 1))

# %%
for budget in (0.25, 0.1, 0.01):
    for theta in (0.0, 0.1, 1.0):
        lo, hi = solve_component_bounds(w, theta, budget)
        p = worst_case_violation(lo, hi, w, theta)
        print(f"budget={budget:<5} theta={theta:<4} [{lo:7.2f}, {hi:7.2f}] width {hi - lo:7.2f}  wc prob {p:.4f}")

# %% [markdown]
# With several components the joint budget alpha is split evenly (the
# union bound), so each interval only has to hold with alpha / n_omega.

# %%
train = solar_samples(17, [500.0] * 3, 12, seed=1)
valid = solar_samples(2000, [500.0] * 3, 12, seed=2, shift=0.25)
for theta in (0.0, 0.005, 0.02):
    box = build_box(train, AmbiguitySpec(theta, 0.01))
    print(f"theta={theta:<6} mean width {np.mean(box.upper - box.lower):6.1f} MW  "
          f"escape on validation {box_escape_fraction(box, valid):.3f}")
