"""The exact rational type used throughout the package.

It is gmpy2's ``mpq``: GMP-backed, and it compares, hashes and mixes in
arithmetic with :class:`fractions.Fraction`, so callers may pass either.
"""
from gmpy2 import mpq as Q
from gmpy2 import mpz

__all__ = ["Q", "mpz", "to_q"]


def to_q(x) -> Q:
    """Coerce an int, Fraction, mpq or "p/q" string to Q."""
    return x if type(x) is Q else Q(x)
