"""
Prime Field Arithmetic
======================

Scalars mod an odd prime p, binomial coefficients mod p via Lucas' theorem,
and the Koszul sign used for graded commutativity.
"""

from dataclasses import dataclass
from functools import lru_cache
import logging

from sympy import isprime

from .errors import PrimeError

logger = logging.getLogger(__name__)


@lru_cache(maxsize=None)
def check_prime(p: int) -> int:
    """Return p if it is an odd prime, raise PrimeError otherwise."""
    if not isinstance(p, int) or p < 3 or p % 2 == 0 or not isprime(p):
        raise PrimeError(f"p={p} is not an odd prime")
    return p


def fp_inverse(a: int, p: int) -> int:
    a %= p
    if a == 0:
        raise ZeroDivisionError(f"0 has no inverse mod {p}")
    return pow(a, -1, p)


@dataclass(frozen=True)
class FpScalar:
    """An element of F_p stored as its least nonnegative residue."""
    value: int
    prime: int

    def __post_init__(self):
        check_prime(self.prime)
        object.__setattr__(self, 'value', self.value % self.prime)

    def _coerce(self, other) -> int:
        if isinstance(other, FpScalar):
            if other.prime != self.prime:
                raise PrimeError(f"mixing F_{self.prime} and F_{other.prime}")
            return other.value
        return int(other)

    def __add__(self, other) -> 'FpScalar':
        return FpScalar(self.value + self._coerce(other), self.prime)

    __radd__ = __add__

    def __sub__(self, other) -> 'FpScalar':
        return FpScalar(self.value - self._coerce(other), self.prime)

    def __rsub__(self, other) -> 'FpScalar':
        return FpScalar(self._coerce(other) - self.value, self.prime)

    def __mul__(self, other) -> 'FpScalar':
        return FpScalar(self.value * self._coerce(other), self.prime)

    __rmul__ = __mul__

    def __neg__(self) -> 'FpScalar':
        return FpScalar(-self.value, self.prime)

    def __truediv__(self, other) -> 'FpScalar':
        return FpScalar(self.value * fp_inverse(self._coerce(other), self.prime), self.prime)

    def __pow__(self, exponent: int) -> 'FpScalar':
        return FpScalar(pow(self.value, exponent, self.prime), self.prime)

    def __eq__(self, other) -> bool:
        if isinstance(other, FpScalar):
            return self.prime == other.prime and self.value == other.value
        if isinstance(other, int):
            return (other - self.value) % self.prime == 0
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.value, self.prime))

    def __int__(self) -> int:
        return self.value

    def __bool__(self) -> bool:
        return self.value != 0

    def signed(self) -> int:
        """Representative in (-p/2, p/2], handy for printing signs."""
        return self.value - self.prime if self.value > self.prime // 2 else self.value

    def __repr__(self) -> str:
        return f"FpScalar({self.value} mod {self.prime})"


@lru_cache(maxsize=65536)
def _lucas(top: int, bottom: int, p: int) -> int:
    result = 1
    while top or bottom:
        a, b = top % p, bottom % p
        if b > a:
            return 0
        # small binomial, a < p
        num = 1
        den = 1
        for j in range(b):
            num = num * (a - j) % p
            den = den * (j + 1) % p
        result = result * num * pow(den, -1, p) % p
        top //= p
        bottom //= p
    return result


def binom(top: int, bottom: int, p: int) -> int:
    """C(top, bottom) mod p as a plain int; zero for negative top or bottom."""
    if bottom < 0 or top < 0 or bottom > top:
        return 0
    return _lucas(top, bottom, p)


def binom_mod_p(top: int, bottom: int, p: int) -> FpScalar:
    """
    Binomial coefficient mod p.

    Args:
        top: Upper argument; negative values give 0
        bottom: Lower argument; negative or larger than a nonnegative top gives 0
        p: Odd prime

    Returns:
        C(top, bottom) mod p
    """
    check_prime(p)
    return FpScalar(binom(top, bottom, p), p)


def sign(exponent: int) -> int:
    """(-1)^exponent as an int."""
    return -1 if exponent % 2 else 1


def koszul_sign(deg_a: int, deg_b: int, p: int = 3) -> FpScalar:
    """(-1)^{deg_a * deg_b} in F_p."""
    return FpScalar(sign(deg_a * deg_b), p)
