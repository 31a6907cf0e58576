"""Bruhat-Tits tree computations and local optimal-embedding counts over Q_p."""
