"""
Elliptica - Elliptic Functions, Baxter-Belavin R-matrices and Painleve VI

A numerical toolkit that evaluates theta, Eisenstein and Kronecker functions,
assembles the Z_N x Z_N elliptic R-matrix and its companions, verifies their
functional identities over pole-guarded random samples, and monitors the
monodromy-preserving equation of the R-matrix valued Painleve VI Lax pair.

Author: Yared Fereja
Version: 1.0.0
License: MIT
"""

__version__ = "1.0.0"
__author__ = "Yared Fereja"
__email__ = "yared.fereja@example.com"
