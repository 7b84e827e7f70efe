"""Cartan (KAK) decompositions, Weyl-orbit reachable sets, and minimum-time
pulse synthesis for coupled spin systems."""

__version__ = "0.1.0"
