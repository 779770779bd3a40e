"""
Cohomology and Homology of Elementary Abelian Groups
====================================================

H*BV_n = E(e_1..e_n) (x) F_p[x_1..x_n] and its dual
H_*BV_n = E(u_1..u_n) (x) Gamma[v_1..v_n], with the pairing, Steenrod
actions on both sides, the GL_n action and the generating series f^0, f^1.

Public constructors take 1-based variable indices; monomials are stored
0-based as (sorted exterior tuple, exponent tuple).
"""

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations, permutations
from typing import Any, Dict, Iterable, Iterator, List, Optional, Sequence, Tuple, Union
import json
import logging

import numpy as np

from .errors import DivisionError, RankMismatchError, SingularMatrixError
from .fp_core import FpScalar, binom, check_prime
from .linalg import det_mod_p, inverse_mod_p
from .series import TruncSeries

logger = logging.getLogger(__name__)

Mono = Tuple[Tuple[int, ...], Tuple[int, ...]]


def merge_exterior(left: Tuple[int, ...], right: Tuple[int, ...]) -> Optional[Tuple[int, Tuple[int, ...]]]:
    """
    Product of two ascending exterior words.

    Returns:
        (sign, merged word), or None when an index repeats
    """
    if set(left) & set(right):
        return None
    inversions = sum(1 for s in left for t in right if s > t)
    return (-1 if inversions % 2 else 1), tuple(sorted(left + right))


def compositions(total: int, bounds: Sequence[Optional[int]]) -> Iterator[Tuple[int, ...]]:
    """Tuples j with sum total and 0 <= j_i <= bounds[i] (None means unbounded)."""
    if not bounds:
        if total == 0:
            yield ()
        return
    cap = total if bounds[0] is None else min(total, bounds[0])
    for first in range(cap + 1):
        for rest in compositions(total - first, bounds[1:]):
            yield (first,) + rest


class _GradedClass:
    """Sparse map monomial -> nonzero residue mod p, shared by both sides."""

    ext_symbol = 'e'
    poly_symbol = 'x'

    __slots__ = ('terms', 'rank', 'prime')

    def __init__(self, terms: Optional[Dict[Mono, int]], rank: int, prime: int):
        self.rank = rank
        self.prime = prime
        self.terms: Dict[Mono, int] = {}
        for mono, coef in (terms or {}).items():
            self._accumulate(mono, coef)

    # -- construction -------------------------------------------------

    @classmethod
    def zero(cls, rank: int, prime: int):
        return cls({}, rank, prime)

    @classmethod
    def one(cls, rank: int, prime: int):
        return cls({((), (0,) * rank): 1}, rank, prime)

    @classmethod
    def monomial(cls, ext: Iterable[int], exps: Sequence[int], coef: int, rank: int, prime: int):
        """Monomial from 1-based exterior indices (any order) and an exponent vector."""
        word = tuple(i - 1 for i in ext)
        sign = 1
        ordered: Tuple[int, ...] = ()
        for index in word:
            merged = merge_exterior(ordered, (index,))
            if merged is None:
                return cls.zero(rank, prime)
            s, ordered = merged
            sign *= s
        return cls({(ordered, tuple(exps)): sign * coef}, rank, prime)

    @classmethod
    def odd_generator(cls, i: int, rank: int, prime: int):
        return cls.monomial([i], (0,) * rank, 1, rank, prime)

    @classmethod
    def even_generator(cls, i: int, rank: int, prime: int, power: int = 1):
        exps = [0] * rank
        exps[i - 1] = power
        return cls.monomial([], exps, 1, rank, prime)

    # -- internals ----------------------------------------------------

    def _accumulate(self, mono: Mono, coef: int) -> None:
        value = (self.terms.get(mono, 0) + coef) % self.prime
        if value:
            self.terms[mono] = value
        else:
            self.terms.pop(mono, None)

    def _check(self, other: '_GradedClass') -> None:
        if type(other) is not type(self):
            raise RankMismatchError(f"cannot combine {type(self).__name__} with {type(other).__name__}")
        if other.rank != self.rank or other.prime != self.prime:
            raise RankMismatchError(
                f"rank/prime mismatch: ({self.rank}, {self.prime}) vs ({other.rank}, {other.prime})")

    def _like(self, terms: Optional[Dict[Mono, int]] = None):
        return type(self)(terms or {}, self.rank, self.prime)

    # -- structure ----------------------------------------------------

    @staticmethod
    def mono_degree(mono: Mono) -> int:
        ext, exps = mono
        return len(ext) + 2 * sum(exps)

    def degrees(self) -> List[int]:
        return sorted({self.mono_degree(m) for m in self.terms})

    def degree(self) -> Optional[int]:
        """Common degree of all terms, None when zero or inhomogeneous."""
        degrees = self.degrees()
        return degrees[0] if len(degrees) == 1 else None

    def homogeneous_part(self, d: int):
        return self._like({m: c for m, c in self.terms.items() if self.mono_degree(m) == d})

    def coefficient(self, mono: Mono) -> int:
        return self.terms.get(mono, 0)

    def __iter__(self) -> Iterator[Tuple[Mono, int]]:
        return iter(sorted(self.terms.items()))

    def __len__(self) -> int:
        return len(self.terms)

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __eq__(self, other) -> bool:
        if isinstance(other, int):
            if other % self.prime == 0:
                return not self.terms
            return self == self.one(self.rank, self.prime).scale(other)
        if not isinstance(other, _GradedClass):
            return NotImplemented
        return (type(self) is type(other) and self.rank == other.rank
                and self.prime == other.prime and self.terms == other.terms)

    def __hash__(self) -> int:
        return hash((type(self).__name__, self.rank, self.prime, frozenset(self.terms.items())))

    # -- linear structure ---------------------------------------------

    def __add__(self, other):
        if isinstance(other, int):
            other = self.one(self.rank, self.prime).scale(other)
        self._check(other)
        result = self._like(dict(self.terms))
        for mono, coef in other.terms.items():
            result._accumulate(mono, coef)
        return result

    __radd__ = __add__

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, factor: Union[int, FpScalar]):
        factor = int(factor)
        return self._like({m: c * factor for m, c in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, (int, FpScalar)):
            return self.scale(other)
        return self.multiply(other)

    def __rmul__(self, other):
        return self.scale(other)

    def __pow__(self, k: int):
        result = self.one(self.rank, self.prime)
        for _ in range(k):
            result = result * self
        return result

    def multiply(self, other):
        raise NotImplementedError

    # -- presentation -------------------------------------------------

    def to_dict(self) -> Dict[str, Any]:
        return {
            "rank": self.rank,
            "prime": self.prime,
            "terms": [
                {"ext": [i + 1 for i in ext], "exp": list(exps), "coef": coef}
                for (ext, exps), coef in self
            ],
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]):
        result = cls.zero(data["rank"], data["prime"])
        for term in data["terms"]:
            result = result + cls.monomial(term["ext"], term["exp"], term["coef"], data["rank"], data["prime"])
        return result

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_json(cls, text: str):
        return cls.from_dict(json.loads(text))

    def _format_mono(self, mono: Mono) -> str:
        ext, exps = mono
        parts = [f"{self.ext_symbol}{i + 1}" for i in ext]
        for i, e in enumerate(exps):
            if e:
                parts.append(self._format_power(i, e))
        return "*".join(parts) or "1"

    def _format_power(self, i: int, e: int) -> str:
        return f"{self.poly_symbol}{i + 1}" + (f"^{e}" if e > 1 else "")

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        chunks = []
        for mono, coef in self:
            signed = coef - self.prime if coef > self.prime // 2 else coef
            body = self._format_mono(mono)
            if signed == 1:
                chunks.append(f"+ {body}")
            elif signed == -1:
                chunks.append(f"- {body}")
            else:
                chunks.append(f"{'-' if signed < 0 else '+'} {abs(signed)}*{body}")
        text = " ".join(chunks)
        return text[2:] if text.startswith("+ ") else "-" + text[2:]

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self}, rank={self.rank}, p={self.prime})"


class CohomClass(_GradedClass):
    """Element of E(e_1..e_n) (x) F_p[x_1..x_n]."""

    ext_symbol = 'e'
    poly_symbol = 'x'

    @classmethod
    def e(cls, i: int, rank: int, prime: int) -> 'CohomClass':
        return cls.odd_generator(i, rank, prime)

    @classmethod
    def x(cls, i: int, rank: int, prime: int, power: int = 1) -> 'CohomClass':
        return cls.even_generator(i, rank, prime, power)

    def multiply(self, other: 'CohomClass') -> 'CohomClass':
        return cohom_mul(self, other)


class HomClass(_GradedClass):
    """Element of E(u_1..u_n) (x) Gamma[v_1..v_n]; exponents are divided-power indices."""

    ext_symbol = 'u'
    poly_symbol = 'v'

    @classmethod
    def u(cls, i: int, rank: int, prime: int) -> 'HomClass':
        return cls.odd_generator(i, rank, prime)

    @classmethod
    def v(cls, i: int, rank: int, prime: int, power: int = 1) -> 'HomClass':
        return cls.even_generator(i, rank, prime, power)

    def multiply(self, other: 'HomClass') -> 'HomClass':
        return hom_mul(self, other)

    def _format_power(self, i: int, e: int) -> str:
        return f"v{i + 1}[{e}]"


def cohom_mul(a: CohomClass, b: CohomClass) -> CohomClass:
    """Graded-commutative product in H*BV_n."""
    a._check(b)
    result = a._like()
    for (ext1, exps1), c1 in a.terms.items():
        for (ext2, exps2), c2 in b.terms.items():
            merged = merge_exterior(ext1, ext2)
            if merged is None:
                continue
            sgn, ext = merged
            exps = tuple(x + y for x, y in zip(exps1, exps2))
            result._accumulate((ext, exps), sgn * c1 * c2)
    return result


def hom_mul(a: HomClass, b: HomClass) -> HomClass:
    """Product in H_*BV_n: exterior in u, divided powers in v."""
    a._check(b)
    p = a.prime
    result = a._like()
    for (ext1, exps1), c1 in a.terms.items():
        for (ext2, exps2), c2 in b.terms.items():
            merged = merge_exterior(ext1, ext2)
            if merged is None:
                continue
            sgn, ext = merged
            coef = sgn * c1 * c2
            for x, y in zip(exps1, exps2):
                coef = coef * binom(x + y, x, p) % p
                if not coef:
                    break
            if coef:
                result._accumulate((ext, tuple(x + y for x, y in zip(exps1, exps2))), coef)
    return result


def pair(c: CohomClass, h: HomClass) -> FpScalar:
    """Kronecker pairing; dual monomials pair to 1."""
    if c.rank != h.rank or c.prime != h.prime:
        raise RankMismatchError("pairing classes of different rank or prime")
    total = 0
    small, large = (c.terms, h.terms) if len(c.terms) <= len(h.terms) else (h.terms, c.terms)
    for mono, coef in small.items():
        other = large.get(mono)
        if other:
            total += coef * other
    return FpScalar(total, c.prime)


# -- Steenrod operations --------------------------------------------------

def _reduced_power_cohom(c: CohomClass, k: int) -> CohomClass:
    p = c.prime
    result = c._like()
    for (ext, exps), coef in c.terms.items():
        for j in compositions(k, exps):
            value = coef
            for a_i, j_i in zip(exps, j):
                value = value * binom(a_i, j_i, p) % p
            if value:
                new = tuple(a + (p - 1) * b for a, b in zip(exps, j))
                result._accumulate((ext, new), value)
    return result


def _bockstein_cohom(c: CohomClass) -> CohomClass:
    result = c._like()
    for (ext, exps), coef in c.terms.items():
        for m, s in enumerate(ext):
            new_exps = list(exps)
            new_exps[s] += 1
            result._accumulate((ext[:m] + ext[m + 1:], tuple(new_exps)), -coef if m % 2 else coef)
    return result


def steenrod_up(eps: int, k: int, c: CohomClass) -> CohomClass:
    """beta^eps P^k acting on the left of a cohomology class."""
    if k < 0:
        return c._like()
    result = _reduced_power_cohom(c, k)
    return _bockstein_cohom(result) if eps else result


def _reduced_power_hom(h: HomClass, k: int) -> HomClass:
    p = h.prime
    result = h._like()
    for (ext, exps), coef in h.terms.items():
        caps = [b // p for b in exps]
        for j in compositions(k, caps):
            value = coef
            new = []
            for b_i, j_i in zip(exps, j):
                low = b_i - (p - 1) * j_i
                value = value * binom(low, j_i, p) % p
                new.append(low)
                if not value:
                    break
            if value:
                result._accumulate((ext, tuple(new)), value)
    return result


def _bockstein_hom(h: HomClass) -> HomClass:
    result = h._like()
    for (ext, exps), coef in h.terms.items():
        for s in range(h.rank):
            if s in ext or exps[s] == 0:
                continue
            position = sum(1 for t in ext if t < s)
            new_exps = list(exps)
            new_exps[s] -= 1
            new_ext = tuple(sorted(ext + (s,)))
            result._accumulate((new_ext, tuple(new_exps)), -coef if position % 2 else coef)
    return result


def steenrod_down(h: HomClass, eps: int, k: int) -> HomClass:
    """
    Right action h beta^eps P^k of the dual Steenrod operations.

    Exactly adjoint to steenrod_up: <steenrod_up(eps, k, c), h> = <c, steenrod_down(h, eps, k)>.
    """
    if k < 0:
        return h._like()
    result = _bockstein_hom(h) if eps else h
    return _reduced_power_hom(result, k)


# -- bases ----------------------------------------------------------------

@lru_cache(maxsize=None)
def monomial_basis(rank: int, d: int) -> Tuple[Mono, ...]:
    """All monomials (ext, exps) of degree d in rank variables."""
    monos = []
    for k in range(min(rank, d) + 1):
        if (d - k) % 2:
            continue
        for ext in combinations(range(rank), k):
            for exps in compositions((d - k) // 2, [None] * rank):
                monos.append((ext, exps))
    return tuple(sorted(monos))


def cohom_basis(rank: int, d: int, prime: int) -> List[CohomClass]:
    return [CohomClass({m: 1}, rank, prime) for m in monomial_basis(rank, d)]


def hom_basis(rank: int, d: int, prime: int) -> List[HomClass]:
    return [HomClass({m: 1}, rank, prime) for m in monomial_basis(rank, d)]


# -- GL_n -----------------------------------------------------------------

@dataclass(frozen=True)
class GLnMatrix:
    """Invertible n x n matrix over F_p."""
    entries: Tuple[Tuple[int, ...], ...]
    prime: int

    def __post_init__(self):
        check_prime(self.prime)
        rows = tuple(tuple(int(a) % self.prime for a in row) for row in self.entries)
        if any(len(row) != len(rows) for row in rows):
            raise RankMismatchError("GL_n matrix must be square")
        object.__setattr__(self, 'entries', rows)
        if self.det() == 0:
            raise SingularMatrixError(f"matrix {rows} is singular mod {self.prime}")

    @property
    def n(self) -> int:
        return len(self.entries)

    def array(self) -> np.ndarray:
        return np.array(self.entries, dtype=np.int64)

    def det(self) -> int:
        return det_mod_p(self.array(), self.prime)

    def inverse(self) -> 'GLnMatrix':
        return GLnMatrix(tuple(map(tuple, inverse_mod_p(self.array(), self.prime).tolist())), self.prime)

    def __matmul__(self, other: 'GLnMatrix') -> 'GLnMatrix':
        product = (self.array() @ other.array()) % self.prime
        return GLnMatrix(tuple(map(tuple, product.tolist())), self.prime)

    @classmethod
    def identity(cls, n: int, prime: int) -> 'GLnMatrix':
        return cls(tuple(tuple(int(i == j) for j in range(n)) for i in range(n)), prime)

    @classmethod
    def T(cls, n: int, prime: int) -> 'GLnMatrix':
        """(1 1; 0 1) on the first two coordinates, identity elsewhere."""
        rows = [[int(i == j) for j in range(n)] for i in range(n)]
        if n >= 2:
            rows[0][1] = 1
        return cls(tuple(map(tuple, rows)), prime)

    @classmethod
    def transposition(cls, n: int, i: int, j: int, prime: int) -> 'GLnMatrix':
        """Permutation matrix swapping coordinates i and j (1-based)."""
        order = list(range(n))
        order[i - 1], order[j - 1] = order[j - 1], order[i - 1]
        return cls(tuple(tuple(int(order[r] == c) for c in range(n)) for r in range(n)), prime)

    @classmethod
    def T_a(cls, n: int, a: int, prime: int) -> 'GLnMatrix':
        """diag(a, 1, ..., 1)."""
        return cls(tuple(tuple((a if i == 0 else 1) if i == j else 0 for j in range(n)) for i in range(n)), prime)

    @classmethod
    def generators(cls, n: int, prime: int) -> List['GLnMatrix']:
        """T, all transpositions and T_a for a in F_p^*; together they generate GL_n."""
        gens = [cls.T(n, prime)] if n >= 2 else []
        gens += [cls.transposition(n, i, j, prime) for i in range(1, n + 1) for j in range(i + 1, n + 1)]
        gens += [cls.T_a(n, a, prime) for a in range(2, prime)]
        return gens


def _linear_forms(A: GLnMatrix, rank: int) -> Tuple[List[CohomClass], List[CohomClass]]:
    p = A.prime
    odd, even = [], []
    for s in range(rank):
        odd.append(sum((CohomClass.e(i + 1, rank, p).scale(A.entries[i][s]) for i in range(rank)),
                       CohomClass.zero(rank, p)))
        even.append(sum((CohomClass.x(i + 1, rank, p).scale(A.entries[i][s]) for i in range(rank)),
                        CohomClass.zero(rank, p)))
    return odd, even


def _act_cohom(A: GLnMatrix, c: CohomClass) -> CohomClass:
    odd, even = _linear_forms(A, c.rank)
    powers: Dict[Tuple[int, int], CohomClass] = {}

    def power(s: int, e: int) -> CohomClass:
        if (s, e) not in powers:
            powers[(s, e)] = even[s] ** e
        return powers[(s, e)]

    result = c._like()
    for (ext, exps), coef in c.terms.items():
        term = CohomClass.one(c.rank, c.prime).scale(coef)
        for s in ext:
            term = term * odd[s]
        for s, e in enumerate(exps):
            if e:
                term = term * power(s, e)
        result = result + term
    return result


def gl_act(A: GLnMatrix, target: Union[CohomClass, HomClass]) -> Union[CohomClass, HomClass]:
    """
    GL_n action: substitution on cohomology, contragredient on homology.

    Args:
        A: Invertible matrix of matching size
        target: Cohomology or homology class

    Returns:
        A . target, with <A.c, A.h> = <c, h>
    """
    if A.n != target.rank or A.prime != target.prime:
        raise RankMismatchError(f"matrix of size {A.n} acting on rank {target.rank}")
    if isinstance(target, CohomClass):
        return _act_cohom(A, target)
    inverse = A.inverse()
    result = target._like()
    for d in target.degrees():
        part = target.homogeneous_part(d)
        for mono in monomial_basis(target.rank, d):
            value = pair(_act_cohom(inverse, CohomClass({mono: 1}, target.rank, target.prime)), part)
            if value:
                result._accumulate(mono, int(value))
    return result


# -- polynomial division --------------------------------------------------

def exact_divide(f: CohomClass, g: CohomClass) -> CohomClass:
    """
    Quotient f/g for a polynomial g (no exterior factors); raises
    DivisionError on a nonzero remainder.
    """
    f._check(g)
    if not g:
        raise DivisionError("division by zero class")
    if any(ext for ext, _ in g.terms):
        raise DivisionError("divisor must be a pure polynomial")
    p = f.prime
    lead_mono = max(g.terms, key=lambda m: m[1][::-1])
    lead_exps = lead_mono[1]
    lead_inv = pow(g.terms[lead_mono], -1, p)
    remainder = f._like(dict(f.terms))
    quotient = f._like()
    guard = 0
    while remainder:
        guard += 1
        if guard > 100000:
            raise DivisionError("division did not terminate")
        mono = max(remainder.terms, key=lambda m: (m[1][::-1], m[0]))
        ext, exps = mono
        diff = tuple(a - b for a, b in zip(exps, lead_exps))
        if any(d < 0 for d in diff):
            raise DivisionError(f"{f!r} is not divisible by {g!r}")
        factor = CohomClass({(ext, diff): remainder.terms[mono] * lead_inv}, f.rank, p)
        quotient = quotient + factor
        remainder = remainder - factor * g
    return quotient


# -- generating series ----------------------------------------------------

def f_series(eps: int, i: int, trunc: int, rank: int = 1, prime: int = 3,
             variable: str = 's') -> TruncSeries:
    """
    f^0(v_i, s) = sum_k v_i^[k] s^k and f^1(u_i, v_i, s) = sum_{k>=1} u_i v_i^[k-1] s^k.

    Args:
        eps: 0 or 1
        i: 1-based variable index
        trunc: Highest power of s kept
        rank: Rank of the ambient H_*BV_n
        prime: Odd prime
        variable: Name of the formal variable

    Returns:
        TruncSeries with HomClass coefficients
    """
    coeffs = {}
    for k in range(trunc + 1):
        if eps == 0:
            coeffs[k] = HomClass.v(i, rank, prime, k)
        elif k >= 1:
            coeffs[k] = HomClass.u(i, rank, prime) * HomClass.v(i, rank, prime, k - 1)
    return TruncSeries.from_univariate(variable, coeffs, trunc, prime)


def underlined(series: TruncSeries, variable: str = 's') -> TruncSeries:
    """s^{-1} times a series without constant term."""
    return series.shift(variable, -1)


def series_steenrod_down(series: TruncSeries, eps: int, variable: str, trunc: int) -> TruncSeries:
    """
    Apply x -> x P^eps(t) = sum_k (x beta^eps P^k) t^k to every coefficient.

    The new variable is appended; the result is truncated at total degree trunc.
    """
    variables = series.variables + (variable,)
    coeffs = {}
    for exps, coef in series.items():
        for k in range(trunc - sum(exps) + 1):
            image = steenrod_down(coef, eps, k)
            if image:
                coeffs[exps + (k,)] = image
    return TruncSeries(variables, coeffs, trunc, series.prime)
