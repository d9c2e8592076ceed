"""Analytical J2 main-problem laboratory.

Two analytical perturbation theories (extended-phase-space fictitious-time
and classical physical-time) cross-validated against a high-precision
numerical reference.
"""

__version__ = "0.1.0"
