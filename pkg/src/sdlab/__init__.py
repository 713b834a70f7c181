"""sdlab: modular weights and partition structure of abelian gauge fields
on compact and ALF four-manifolds, computed numerically with certified
truncations and dual-route cross-checks."""

__version__ = "0.1.0"
