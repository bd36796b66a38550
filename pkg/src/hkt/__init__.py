"""Numerical and exact verification of hyper-Kähler-with-torsion geometry.

Submodules: ``dual`` (forward-mode AD), ``chart`` and ``calculus``
(forms on coordinate charts), ``quaternionic`` (structures and the HKT
criteria), ``potential`` (potential-generated metrics), ``exact``,
``invariant`` and ``homogeneous`` (left-invariant forms on Lie algebras),
``reduction`` (circle moment maps), ``catalog``/``report``/``cli``.
"""

__version__ = "0.1.0"
