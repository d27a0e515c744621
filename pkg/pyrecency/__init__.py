"""pyrecency: recency-weighted high-order Markov inference"""

__version__ = "0.1.0"
