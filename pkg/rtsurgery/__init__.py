"""
rtsurgery - Reshetikhin-Turaev invariants of surgeries on twist knots

This package evaluates the SO(3) Reshetikhin-Turaev invariants RT_r(M_{p,q})
of the closed manifolds obtained by q-surgery on the twist knots K_p, the
complex potential functions whose critical values govern their growth, the
hyperbolic gluing equations of M_{p,q}, and the asymptotic comparison between
the two.
"""

__version__ = "1.0.0"
__author__ = "rtsurgery developers"
