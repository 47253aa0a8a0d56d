"""Desk-scale statistics of primes, closed geodesics, zeros, and spectra
in short intervals."""

from . import arith, geodesics, rmt, tables, wp_integrals, zeros

__all__ = ["arith", "geodesics", "rmt", "tables", "wp_integrals", "zeros"]
__version__ = "0.1.0"
