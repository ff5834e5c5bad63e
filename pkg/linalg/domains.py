"""
Scalar domains - exact coefficient rings for every computation.

Scalars are sympy polys domain elements:

    q       ->  QQ   (arbitrary precision rationals, always reduced)
    z       ->  ZZ   (arbitrary precision integers)
    fp:<p>  ->  GF(p) with canonical representatives in [0, p)

A computation fixes one domain up front. Mixing two domains in one matrix
operation raises DomainMismatch.
"""

import logging
from fractions import Fraction
from typing import Any, Tuple, Union

from sympy import isprime
from sympy.polys.domains import GF, QQ, ZZ

from exceptions import DomainMismatch, SchemaError

logger = logging.getLogger(__name__)

ScalarText = Union[str, int, Fraction]


def parse_domain(text: str):
    """
    Parse a scalar selector (`q`, `z`, `fp:<p>`) into a sympy domain.

    Raises SchemaError for unknown selectors or a non-prime modulus.
    """
    key = (text or "").strip().lower()
    if key in ("q", "qq"):
        return QQ
    if key in ("z", "zz"):
        return ZZ
    if key.startswith("fp:") or key.startswith("gf:"):
        try:
            p = int(key.split(":", 1)[1])
        except ValueError:
            raise SchemaError(f"Bad prime in scalar selector '{text}'", {"field": "scalar"})
        if p < 2 or not isprime(p):
            raise SchemaError(f"Modulus {p} is not prime", {"field": "scalar"})
        return GF(p, symmetric=False)
    raise SchemaError(f"Unknown scalar selector '{text}'", {"field": "scalar"})


def domain_name(K) -> str:
    if K == QQ:
        return "q"
    if K == ZZ:
        return "z"
    return f"fp:{K.characteristic()}"


def is_field(K) -> bool:
    return bool(K.is_Field)


def characteristic(K) -> int:
    return 0 if K in (QQ, ZZ) else int(K.characteristic())


def scalar(K, value: ScalarText) -> Any:
    """
    Convert an int, Fraction or string such as "-3/4" into an element of K.

    Non-integral values are rejected over ZZ; over GF(p) the denominator
    must be invertible.
    """
    if isinstance(value, str):
        try:
            value = Fraction(value.strip())
        except (ValueError, ZeroDivisionError):
            raise SchemaError(f"Bad scalar '{value}'", {"field": "scalar"})
    if isinstance(value, int):
        return K.convert(value)
    if isinstance(value, Fraction):
        num = K.convert(value.numerator)
        if value.denominator == 1:
            return num
        if K == ZZ:
            raise SchemaError(f"Non-integral scalar {value} over ZZ", {"field": "scalar"})
        den = K.convert(value.denominator)
        if not den:
            raise SchemaError(f"Denominator of {value} vanishes in {domain_name(K)}", {"field": "scalar"})
        return K.quo(num, den)
    return K.convert(value)


def sign(K, exponent: int) -> Any:
    """(-1)**exponent as an element of K."""
    return K.one if exponent % 2 == 0 else -K.one


def to_pair(K, a) -> Tuple[int, int]:
    """Exact (numerator, denominator) pair used by reports."""
    if K == QQ:
        return int(K.numer(a)), int(K.denom(a))
    if K == ZZ:
        return int(a), 1
    p = K.characteristic()
    return int(K.to_sympy(a)) % p, 1


def from_pair(K, pair) -> Any:
    num, den = pair
    return scalar(K, Fraction(int(num), int(den)))


def to_text(K, a) -> str:
    num, den = to_pair(K, a)
    return str(num) if den == 1 else f"{num}/{den}"


def require_same(*domains):
    first = domains[0]
    for other in domains[1:]:
        if other != first:
            raise DomainMismatch(f"Scalar domains differ: {domain_name(first)} vs {domain_name(other)}")
    return first
