# %% [markdown]
# One bus, one generator, one solar site: every method on a problem small
# enough to check by hand.

# %%
import numpy as np

from drlaed.cases import load_case
from drlaed.formulations import MethodSpec, solve_dispatch
from drlaed.problem import assemble
from drlaed.risk import AmbiguitySpec, SampleSet

net = load_case("toy")
cp = assemble(net)
print("balance row: D =", cp.D, " E =", cp.E, " f =", cp.f)

train = SampleSet(np.array([[0.5], [0.3], [0.6], [0.45], [0.55]]))

# %% [markdown]
# The generator must cover demand (1.5 MW) minus whatever the sun delivers.
# The oracle knows the realized output, the scenario method covers the
# worst training sample, and the distributionally robust methods add a
# margin that grows with the radius.

# %%
oracle = solve_dispatch(MethodSpec("deterministic-oracle", realized=[0.5]), cp)
scen = solve_dispatch(MethodSpec("scenario"), cp, train)
print(f"oracle     x = {oracle.x[0]:.4f}")
print(f"scenario   x = {scen.x[0]:.4f}")

for theta in (0.0, 0.01, 0.05):
    amb = AmbiguitySpec(theta, alpha=0.2)
    cvar = solve_dispatch(MethodSpec("drcvp", amb), cp, train)
    box = solve_dispatch(MethodSpec("drccp-robust", amb), cp, train)
    print(f"theta={theta:<5} drcvp x = {cvar.x[0]:.4f}   drccp-robust x = {box.x[0]:.4f}"
          f"   box = [{box.box.lower[0]:.3f}, {box.box.upper[0]:.3f}]")

# %% [markdown]
# For a single scalar row with unit coefficient the DR-CVaR requirement is
# the empirical CVaR shifted by theta / alpha.

# %%
from drlaed.risk import empirical_cvar

short = 1.5 - train.samples[:, 0]
for theta in (0.0, 0.01, 0.05):
    x = solve_dispatch(MethodSpec("drcvp", AmbiguitySpec(theta, 0.2)), cp, train).x[0]
    print(f"theta={theta:<5} x = {x:.6f}   CVaR + theta/alpha = {empirical_cvar(short, 0.2) + theta / 0.2:.6f}")
