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
# # Reducing C^3 + C^3 by a circle
#
# The ln-modified metric on R^12 with a circle acting diagonally. The
# zero level of the moment map, divided by the circle, should carry an
# induced HKT structure. Here we check the hypotheses numerically.

# %%
import numpy as np

from hkt.reduction import (
    KillingAction,
    cauchy_riemann_residual,
    flat6_structure,
    horizontal_frame,
    proportionality_check,
    sample_level_set,
    su3_moment_map,
    transversality_check,
)

HH = flat6_structure()
nu = su3_moment_map()
X = KillingAction().vector_field
pts = sample_level_set(50, seed=1)
print("level residual", nu.level_residual(pts))

# %% [markdown]
# I_1 d nu_1 = I_2 d nu_2 = I_3 d nu_3, the Cauchy-Riemann condition.
# Putting the conjugate on the other slot of the Hermitian product breaks it.

# %%
print("second slot:", cauchy_riemann_residual(HH.structure, nu, pts)[0])
print("first slot: ", cauchy_riemann_residual(HH.structure, su3_moment_map(convention="first"), pts)[0])

# %%
print("transversal:", transversality_check(HH.structure, nu, X, pts).ok)
pr = proportionality_check(HH, nu, X, pts)
print("d nu_a + 2 mu iota_X F_a:", pr.residual)

# %% [markdown]
# The horizontal space at each point has dimension 8. The induced
# structures satisfy the quaternion relations and are Hermitian for h.

# %%
frames = [horizontal_frame(HH, nu, X, p) for p in pts]
print({f.dim for f in frames})
print("quaternion", max(f.quaternion_residual() for f in frames))
print("hermitian ", max(f.hermitian_residual() for f in frames))
print("min eig   ", min(f.min_eigenvalue() for f in frames))
print(np.round(frames[0].invariants()[1], 6))
