# ---
# jupyter:
#   jupytext:
#     formats: ipynb,py:percent
#     text_representation:
#       extension: .py
#       format_name: percent
#       format_version: '1.3'
#   kernelspec:
#     display_name: Python 3
#     language: python
#     name: python3
# ---

# %% [markdown]
# # Potentials and the Hopf family
#
# Start from flat quaternionic space with its standard potential
# mu = |q|^2 / 2, push the potential through a function f and look at
# the metric that comes out.

# %%
import numpy as np

from hkt.calculus import pullback_metric
from hkt.potential import (
    GeneratorFunction,
    PotentialStructure,
    hopf_action_matrix,
    hopf_structure,
    hyperkahler_residual,
    modified_metric,
    modified_structure,
    positivity_margin,
)
from hkt.quaternionic import hkt_residual, holomorphic_residual

PS = PotentialStructure.flat(2)
pts = PS.chart.sample(100, seed=0)

# %% [markdown]
# The flat potential is hyperkahler: dd_a mu = d_b d_c mu for cyclic (a, b, c).

# %%
print("flat hyperkahler residual", hyperkahler_residual(PS.structure, PS.mu, pts)[0])

# %% [markdown]
# Each generator gives a metric that stays HKT. Both criteria agree.

# %%
for name in ("power-2", "power-3", "log", "exp"):
    gen = GeneratorFunction.named(name)
    HH = modified_structure(PS, gen)
    mm = modified_metric(PS, gen, pts)
    print(f"{name:8s} hkt {hkt_residual(HH, pts)[0]:.1e}  holomorphic {holomorphic_residual(HH, pts)[0]:.1e}"
          f"  min eig {mm.min_eigenvalue:.3f}")

# %% [markdown]
# For f = ln the positivity margin is exactly 1/(2 mu).

# %%
margin = positivity_margin(PS, GeneratorFunction.log()).at(pts)
print(np.abs(margin - 1 / (2 * PS.mu.at(pts))).max())

# %% [markdown]
# The ln metric is no longer hyperkahler, but the scaling-and-rotation
# action (z, w) -> (r e^{it} z, r e^{-it} w) preserves it. That is what
# lets it descend to the Hopf quotients.

# %%
_, HH, pot = hopf_structure(2)
print("hopf-log hyperkahler residual", hyperkahler_residual(PS.structure, pot, pts)[0])

for r in (0.3, 0.6, 0.9):
    phi = hopf_action_matrix(r, [0.7, 1.9])
    gap = np.abs(np.asarray(pullback_metric(phi, HH.g).fn(pts)) - np.asarray(HH.g.fn(pts))).max()
    print(f"r={r}: metric moved by {gap:.1e}")
