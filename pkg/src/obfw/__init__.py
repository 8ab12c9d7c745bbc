"""Dual Shamir/additive secret sharing, secure comparison, and the
oblivious Bloom-filter firewall built on top of them."""

__version__ = "0.1.0"

from . import bloom, compare, dual, field, firewall, net, rng, sharing

__all__ = ["bloom", "compare", "dual", "field", "firewall", "net", "rng",
           "sharing", "__version__"]
