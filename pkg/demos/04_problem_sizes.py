# %% [markdown]
# How the master programs grow with the number of samples on a 118-bus,
# 24-hour system with 54 generators and 18 solar sites.

# %%
from drlaed.cases import syn118
from drlaed.formulations import problem_size
from drlaed.problem import dimensions

d = dimensions(syn118(), ramp_from_initial=False)
print(d)

print(f"{'method':<14}{'N':>5}{'variables':>12}{'constraints':>14}{'subproblems':>13}")
for method in ("scenario", "drcvp", "drccp-robust"):
    for N in (10, 50, 200):
        s = problem_size(method, d["n_x"], d["K"], d["m_det"], N, d["n_omega"])
        print(f"{method:<14}{N:>5}{s['variables']:>12}{s['constraints']:>14}{s['subproblems']:>13}")

# %% [markdown]
# The box-based master keeps its size fixed and moves the sample
# dependence into one small bound problem per uncertain component.
