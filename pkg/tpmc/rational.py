import argparse
from fractions import Fraction


def parse_rational(s):
    """Parses exact rationals.  Accepts ints, "p/q" strings and integer strings."""
    if isinstance(s, bool): return None
    if isinstance(s, int): return Fraction(s)
    if isinstance(s, Fraction): return s
    if not isinstance(s, str): return None
    try: return Fraction(s.strip())
    except (ValueError, ZeroDivisionError): return None


def rational_argument(s):
    """Argparse type converter for rational options such as --density."""
    q = parse_rational(s)
    if q is None: raise argparse.ArgumentTypeError("Unparsable rational: " + s)
    return q


def format_rational(q):
    """Integers come out as ints, everything else as a "p/q" string."""
    q = Fraction(q)
    if q.denominator == 1: return q.numerator
    return f"{q.numerator}/{q.denominator}"


def rational_range_inclusive(lo, hi, denominator=1):
    """Produces a list of all multiples of 1/denominator from lo to hi (inclusive)."""
    r = []
    step = Fraction(1, denominator)
    q = Fraction(lo)
    while q <= hi:
        r.append(q)
        q += step
    return r


def is_integral(q):
    return Fraction(q).denominator == 1
