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
# # Left-invariant HKT structures, exactly
#
# On a Lie algebra everything reduces to structure constants, so the HKT
# identity can be checked with no rounding at all. Numbers live in
# Q(sqrt(d), i).

# %%
from hkt.homogeneous import (
    build_hypercomplex,
    heisenberg_hkt,
    joyce_decompose,
    su_root_data,
    verify_decomposition,
    verify_nilpotent_hkt,
)
from hkt.invariant import group_torsion_check

# %% [markdown]
# ## su(3)
#
# Split su(3) into an abelian piece b, one sp(1) and a 4-dimensional
# sp(1)-module f.

# %%
D = joyce_decompose(su_root_data(3))
print("dims (b, sp1, f):", D.dims())
print(verify_decomposition(D))

# %%
G = build_hypercomplex(D)
S = G.structure
print("quaternion relations:", S.quaternionic(), " hermitian:", S.hermitian())
print("d_1F_1 = d_2F_2 = d_3F_3 exactly:", S.hkt_identity())
print(group_torsion_check(S, G.Bhat))

# %% [markdown]
# The sp(1) action on f has to enter from the left. Flip it and the
# quaternion relations break.

# %%
print(build_hypercomplex(D, f_sign=-1).structure.quaternionic())

# %% [markdown]
# ## Heisenberg-type algebras
#
# The three structures on h_{2n} + R^3 are abelian, which makes every
# invariant (2,0)-form closed.

# %%
for n in (1, 2):
    print(n, verify_nilpotent_hkt(heisenberg_hkt(n)))

# %% [markdown]
# Doubling one bracket breaks almost everything. That is useful as a
# regression witness.

# %%
print(verify_nilpotent_hkt(heisenberg_hkt(1, corrupt=True)))
