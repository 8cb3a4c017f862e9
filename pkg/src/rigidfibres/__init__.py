"""Rigid SL2 monodromy triples over real cyclotomic rings, their hyperelliptic
families, and mod-ell Frobenius congruences between fibres."""

__version__ = '0.1.0'
