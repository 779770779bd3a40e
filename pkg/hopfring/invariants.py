"""
Dickson-Mui Invariants
======================

Determinant brackets, the Dickson invariants q_{n,i}, the Mui invariants
M and R, the string order on index strings with leading terms, and the
additive bases of the invariants, of B_k[n], of the cokernel of the
restriction from the symmetric group, and of the dual coinvariants.
"""

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations, permutations, product
from typing import Iterator, List, Optional, Sequence, Tuple
import logging

import numpy as np
from sympy import Matrix, Poly, symbols
from sympy.combinatorics import Permutation

from .biv_algebra import CohomClass, GLnMatrix, HomClass, Mono, exact_divide, gl_act, steenrod_up
from .errors import DivisionError, HopfRingError, StringError
from .fp_core import check_prime, sign
from .linalg import solve_in_span

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class IndexString:
    """
    A string ((eps_1, i_1), ..., (eps_n, i_n)) indexing R^{eps_1} q^{i_1} ... monomials.

    i_1 may be negative; i_s >= 0 for s >= 2.
    """
    pairs: Tuple[Tuple[int, int], ...]

    def __post_init__(self):
        pairs = tuple((int(e), int(i)) for e, i in self.pairs)
        if any(e not in (0, 1) for e, _ in pairs):
            raise StringError(f"epsilons must be 0 or 1 in {pairs}")
        if any(i < 0 for _, i in pairs[1:]):
            raise StringError(f"only the first index may be negative in {pairs}")
        object.__setattr__(self, 'pairs', pairs)

    @classmethod
    def of(cls, *flat: int) -> 'IndexString':
        """Build from a flat (eps_1, i_1, eps_2, i_2, ...) sequence."""
        if len(flat) % 2:
            raise StringError("flat string must have even length")
        return cls(tuple(zip(flat[0::2], flat[1::2])))

    @property
    def length(self) -> int:
        return len(self.pairs)

    @property
    def epsilons(self) -> Tuple[int, ...]:
        return tuple(e for e, _ in self.pairs)

    @property
    def indices(self) -> Tuple[int, ...]:
        return tuple(i for _, i in self.pairs)

    @property
    def b(self) -> int:
        return sum(self.epsilons)

    @property
    def m(self) -> int:
        return max(self.epsilons, default=0)

    def invariant_condition(self) -> bool:
        """i_1 - m(I) + b(I) >= 0."""
        return self.indices[0] - self.m + self.b >= 0

    def B_condition(self, k: int = 0) -> bool:
        """2 i_1 + b(I) >= k."""
        return 2 * self.indices[0] + self.b >= k

    def cokernel_condition(self) -> bool:
        """m(I) - b(I) <= i_1 < -b(I)/2."""
        i1 = self.indices[0]
        return self.m - self.b <= i1 and 2 * i1 < -self.b

    def flat(self) -> Tuple[int, ...]:
        return tuple(x for pair in self.pairs for x in pair)

    def __str__(self) -> str:
        return "(" + ",".join(str(x) for x in self.flat()) + ")"


# -- brackets -------------------------------------------------------------

def _permutation_sign(perm: Sequence[int]) -> int:
    inversions = sum(1 for a in range(len(perm)) for b in range(a + 1, len(perm)) if perm[a] > perm[b])
    return sign(inversions)


def embed(c: CohomClass, rank: int) -> CohomClass:
    """View a class in the first variables of a larger rank."""
    pad = rank - c.rank
    return CohomClass({(ext, exps + (0,) * pad): coef for (ext, exps), coef in c.terms.items()},
                      rank, c.prime)


def frobenius(c: CohomClass) -> CohomClass:
    """p-th power of a polynomial class (no exterior part)."""
    if any(ext for ext, _ in c.terms):
        raise HopfRingError("frobenius is only additive on polynomial classes")
    p = c.prime
    return CohomClass({((), tuple(p * a for a in exps)): coef for (_, exps), coef in c.terms.items()},
                      c.rank, p)


def det_bracket(r: Sequence[int], prime: int) -> CohomClass:
    """[r_1, ..., r_n] = det(x_i^{p^{r_j}}) in rank n = len(r)."""
    check_prime(prime)
    n = len(r)
    result = CohomClass.zero(n, prime)
    for perm in permutations(range(n)):
        exps = [0] * n
        for j, i in enumerate(perm):
            exps[i] += prime ** r[j]
        result._accumulate(((), tuple(exps)), _permutation_sign(perm))
    return result


def mui_bracket(k: int, r: Sequence[int], prime: int) -> CohomClass:
    """
    [k; r_{k+1}, ..., r_n]: determinant with k rows of exterior generators.

    The 1/k! is realised by assigning ascending columns to the exterior
    rows, so each unordered term is produced once.
    """
    check_prime(prime)
    n = k + len(r)
    if k < 0 or k > n:
        raise StringError(f"k={k} out of range for rank {n}")
    result = CohomClass.zero(n, prime)
    columns = range(n)
    for ext in combinations(columns, k):
        rest = [c for c in columns if c not in ext]
        for assignment in permutations(rest):
            perm = ext + assignment
            exps = [0] * n
            for j, i in enumerate(assignment):
                exps[i] += prime ** r[j]
            result._accumulate((ext, tuple(exps)), _permutation_sign(perm))
    return result


def bracket_by_integer_determinant(k: int, r: Sequence[int], prime: int) -> CohomClass:
    """
    [k; r_{k+1}, ..., r_n] by Laplace expansion along the exterior rows, each
    polynomial minor taken as an integer determinant and reduced mod p.
    """
    check_prime(prime)
    n = k + len(r)
    xs = symbols(f'x1:{n + 1}')
    result = CohomClass.zero(n, prime)
    for ext in combinations(range(n), k):
        rest = [c for c in range(n) if c not in ext]
        minor = Matrix([[xs[i] ** (prime ** rj) for i in rest] for rj in r])
        parity = Permutation(list(ext) + rest).signature()
        for exps, coef in Poly(minor.det(), *xs).terms():
            if coef % prime:
                result._accumulate((ext, tuple(exps)), parity * int(coef))
    return result


def integer_bracket_mismatches(n: int, prime: int) -> List[str]:
    """Labels of the rank-n brackets L_{n,i} and M_{n;S} where both determinant routes disagree."""
    bad = []
    for i in range(n + 1):
        r = [j for j in range(n + 1) if j != i]
        if det_bracket(r, prime) != bracket_by_integer_determinant(0, r, prime):
            bad.append(f"L_{n},{i}")
    for k in range(1, n + 1):
        for idx in combinations(range(n), k):
            r = [j for j in range(n) if j not in idx]
            if mui_bracket(k, r, prime) != bracket_by_integer_determinant(k, r, prime):
                bad.append(f"M_{n};{','.join(map(str, idx))}")
    return bad


@lru_cache(maxsize=None)
def dickson_L(n: int, i: int, prime: int) -> CohomClass:
    """L_{n,i} = [0, ..., i-hat, ..., n]; L_{n,n} is L_n."""
    return det_bracket([j for j in range(n + 1) if j != i], prime)


def dickson_Ln(n: int, prime: int) -> CohomClass:
    if n == 0:
        return CohomClass.one(0, prime)
    return dickson_L(n, n, prime)


@lru_cache(maxsize=None)
def mui_M(n: int, idx: Tuple[int, ...], prime: int) -> CohomClass:
    """M_{n; i_1..i_k} = [k; 0, ..., n-1 with i_1..i_k removed]."""
    _check_mui_indices(n, idx)
    return mui_bracket(len(idx), [j for j in range(n) if j not in idx], prime)


def _check_mui_indices(n: int, idx: Sequence[int]) -> None:
    if list(idx) != sorted(set(idx)) or any(i < 0 or i >= n for i in idx):
        raise StringError(f"indices {tuple(idx)} must be ascending in [0, {n - 1}]")


@lru_cache(maxsize=None)
def v_product(n: int, prime: int) -> CohomClass:
    """V_n = prod over lambda in F_p^{n-1} of (lambda_1 x_1 + ... + x_n)."""
    check_prime(prime)
    if n < 1:
        raise StringError("V_n needs n >= 1")
    result = CohomClass.one(n, prime)
    for lambdas in product(range(prime), repeat=n - 1):
        form = CohomClass.x(n, n, prime)
        for j, lam in enumerate(lambdas):
            if lam:
                form = form + CohomClass.x(j + 1, n, prime).scale(lam)
        result = result * form
    return result


@lru_cache(maxsize=None)
def dickson_q(n: int, i: int, prime: int) -> CohomClass:
    """
    Dickson invariant q_{n,i} by q_{n,i} = q_{n-1,i-1}^p + q_{n-1,i} V_n^{p-1}.

    Args:
        n: Rank
        i: Index; q_{n,n} = 1 and q_{n,i} = 0 for i < 0
        prime: Odd prime

    Returns:
        The invariant as a rank-n cohomology class
    """
    check_prime(prime)
    if i < 0 or i > n:
        return CohomClass.zero(n, prime)
    if i == n:
        return CohomClass.one(n, prime)
    first = embed(frobenius(dickson_q(n - 1, i - 1, prime)), n) if i >= 1 else CohomClass.zero(n, prime)
    second = embed(dickson_q(n - 1, i, prime), n) * (v_product(n, prime) ** (prime - 1))
    return first + second


def dickson_q_by_division(n: int, i: int, prime: int) -> CohomClass:
    """q_{n,i} = L_{n,i} / L_n by exact sparse division."""
    return exact_divide(dickson_L(n, i, prime), dickson_Ln(n, prime))


@lru_cache(maxsize=None)
def mui_R(n: int, idx: Tuple[int, ...], prime: int) -> CohomClass:
    """R_{n; i_1..i_k} = M_{n; i_1..i_k} L_n^{p-2}."""
    idx = tuple(idx)
    return mui_M(n, idx, prime) * (dickson_Ln(n, prime) ** (prime - 2))


def mui_product_relation(n: int, idx: Tuple[int, ...], prime: int) -> Tuple[CohomClass, CohomClass]:
    """
    Both sides of R_{n;i_1} ... R_{n;i_k} = (-1)^{k(k-1)/2} R_{n;i_1..i_k} q_{n,0}^{k-1}.
    """
    _check_mui_indices(n, idx)
    k = len(idx)
    lhs = CohomClass.one(n, prime)
    for i in idx:
        lhs = lhs * mui_R(n, (i,), prime)
    rhs = mui_R(n, tuple(idx), prime) * (dickson_q(n, 0, prime) ** (k - 1))
    return lhs, rhs.scale(sign(k * (k - 1) // 2))


# -- degrees and named elements ---------------------------------------

def degree_q(n: int, i: int, prime: int) -> int:
    return 2 * (prime ** n - prime ** i)


def degree_R(n: int, idx: Sequence[int], prime: int) -> int:
    return len(idx) + 2 * (prime ** n - 1) - 2 * sum(prime ** i for i in idx)


def string_degree(I: IndexString, prime: int) -> int:
    """Degree of q^I = R_{n;0}^{eps_1} q_{n,0}^{i_1} ... R_{n;n-1}^{eps_n} q_{n,n-1}^{i_n}."""
    n = I.length
    return sum(2 * (i + e) * (prime ** n - prime ** s) - e for s, (e, i) in enumerate(I.pairs))


def invariant_monomial(I: IndexString, prime: int) -> CohomClass:
    """Evaluate q^I as a polynomial; needs i_1 - m(I) + b(I) >= 0."""
    if not I.invariant_condition():
        raise StringError(f"{I} violates i_1 - m + b >= 0")
    n = I.length
    b = I.b
    support = tuple(s for s, e in enumerate(I.epsilons) if e)
    result = CohomClass.one(n, prime)
    if b:
        result = mui_R(n, support, prime).scale(sign(b * (b - 1) // 2))
    exponents = list(I.indices)
    if b:
        exponents[0] += b - 1
    for s, e in enumerate(exponents):
        if e:
            result = result * (dickson_q(n, s, prime) ** e)
    return result


# -- order and leading terms ------------------------------------------

def string_key(pairs: Sequence[Tuple[int, int]], prime: int) -> Tuple[Tuple[int, int], ...]:
    """Sort key realising the recursive order: (i_k + p^{k-1} eps_k, eps_k) lexicographically."""
    return tuple((i + prime ** k * e, e) for k, (e, i) in enumerate(pairs))


def string_compare(I: IndexString, J: IndexString, prime: int) -> int:
    """-1, 0 or 1 as I <, =, > J."""
    if I.length != J.length:
        raise StringError("strings of different length are not comparable")
    a, b = string_key(I.pairs, prime), string_key(J.pairs, prime)
    return (a > b) - (a < b)


def mono_pairs(mono: Mono) -> Tuple[Tuple[int, int], ...]:
    ext, exps = mono
    return tuple((int(s in ext), a) for s, a in enumerate(exps))


def leading_term(f: CohomClass) -> Tuple[Mono, int]:
    """Smallest monomial of f under the string order, with its coefficient."""
    if not f:
        raise HopfRingError("zero class has no leading term")
    mono = min(f.terms, key=lambda m: string_key(mono_pairs(m), f.prime))
    return mono, f.terms[mono]


def leading_exponents(I: IndexString, prime: int) -> Tuple[int, ...]:
    """Exponents p^{s-1}(p-1)(i_1 + ... + i_s + b) - p^{s-1} eps_s of the predicted leading monomial."""
    b = I.b
    partial = 0
    exps = []
    for s, (e, i) in enumerate(I.pairs):
        partial += i
        exps.append(prime ** s * (prime - 1) * (partial + b) - prime ** s * e)
    return tuple(exps)


def expected_leading_term(I: IndexString, prime: int) -> Tuple[Mono, int]:
    """Predicted leading monomial of q^I and its sign (-1)^{eps_2 + 2 eps_3 + ...}."""
    ext = tuple(s for s, e in enumerate(I.epsilons) if e)
    twist = sum(s * e for s, e in enumerate(I.epsilons))
    return (ext, leading_exponents(I, prime)), sign(twist) % prime


def coinv_monomial(I: IndexString, prime: int) -> HomClass:
    """The signed dual monomial Q(I) = (-1)^{eps_2+...} u^eps v^[...]."""
    (ext, exps), sgn = expected_leading_term(I, prime)
    if any(a < 0 for a in exps):
        raise StringError(f"{I} has no dual monomial")
    return HomClass({(ext, exps): sgn}, I.length, prime)


# -- bases ------------------------------------------------------------

def _strings_of_degree(n: int, d: int, prime: int, i1_min: int,
                       i1_max: Optional[int] = None) -> Iterator[IndexString]:
    """All length-n strings of degree d with i_1 in [i1_min, i1_max]."""
    if n < 1:
        return
    top = prime ** n
    weights = [2 * (top - prime ** s) for s in range(n)]
    for eps in product((0, 1), repeat=n):
        b = sum(eps)
        target = d + b
        # sum_s weights[s] * (i_s + eps_s) == target
        rest_min = sum(w * e for w, e in zip(weights[1:], eps[1:]))
        if (target - rest_min) < weights[0] * (i1_min + eps[0]):
            continue
        hi = (target - rest_min) // weights[0] - eps[0]
        if i1_max is not None:
            hi = min(hi, i1_max)
        for i1 in range(i1_min, hi + 1):
            remaining = target - weights[0] * (i1 + eps[0])
            for tail in _tail_indices(weights[1:], eps[1:], remaining):
                yield IndexString(((eps[0], i1),) + tuple(zip(eps[1:], tail)))


def _tail_indices(weights: Sequence[int], eps: Sequence[int], remaining: int) -> Iterator[Tuple[int, ...]]:
    if not weights:
        if remaining == 0:
            yield ()
        return
    w, e = weights[0], eps[0]
    rest_min = sum(wt * ep for wt, ep in zip(weights[1:], eps[1:]))
    i = 0
    while w * (i + e) + rest_min <= remaining:
        for tail in _tail_indices(weights[1:], eps[1:], remaining - w * (i + e)):
            yield (i,) + tail
        i += 1


def _sorted(strings, prime: int) -> List[IndexString]:
    return sorted(strings, key=lambda I: string_key(I.pairs, prime))


def basis_invariants(n: int, d: int, prime: int) -> List[IndexString]:
    """Strings with i_1 - m + b >= 0 and degree d: a basis of (H*BV_n)^{GL_n} in degree d."""
    return _sorted((I for I in _strings_of_degree(n, d, prime, -n) if I.invariant_condition()), prime)


def basis_B(n: int, k: int, d: int, prime: int) -> List[IndexString]:
    """Strings with 2 i_1 + b >= k and degree d: a basis of B_k[n] in degree d."""
    if k < 0:
        raise StringError("cutoff k must be nonnegative")
    return _sorted((I for I in _strings_of_degree(n, d, prime, -n) if I.B_condition(k)), prime)


def basis_cokernel(n: int, d: int, prime: int) -> List[IndexString]:
    """Strings with m - b <= i_1 < -b/2 and degree d."""
    return _sorted((I for I in _strings_of_degree(n, d, prime, -n, 0) if I.cokernel_condition()), prime)


def basis_coinv_dual(n: int, k: Optional[int], d: int, prime: int) -> List[HomClass]:
    """
    Dual monomials Q(I) for B_k[n]^* in degree d; k=None gives the
    coinvariant basis indexed by i_1 + b - m >= 0.
    """
    strings = basis_invariants(n, d, prime) if k is None else basis_B(n, k, d, prime)
    return [coinv_monomial(I, prime) for I in strings]


# -- GL_n invariance and spans ----------------------------------------

def verify_gl_invariance(n: int, c: CohomClass) -> bool:
    """True iff c is fixed by T, every transposition and every T_a."""
    if c.rank != n:
        raise HopfRingError(f"class of rank {c.rank} tested against GL_{n}")
    for g in GLnMatrix.generators(n, c.prime):
        if gl_act(g, c) != c:
            logger.debug(f"{c!r} moved by {g.entries}")
            return False
    return True


def coefficient_matrix(classes: Sequence[CohomClass], monos: Optional[Sequence[Mono]] = None
                       ) -> Tuple[np.ndarray, List[Mono]]:
    if monos is None:
        monos = sorted({m for c in classes for m in c.terms})
    index = {m: j for j, m in enumerate(monos)}
    rows = np.zeros((len(classes), len(monos)), dtype=np.int64)
    for r, c in enumerate(classes):
        for m, coef in c.terms.items():
            rows[r, index[m]] = coef
    return rows, list(monos)


def in_span(classes: Sequence[CohomClass], target: CohomClass) -> bool:
    """Whether target is an F_p-combination of classes."""
    if not target:
        return True
    if not classes:
        return False
    monos = sorted({m for c in list(classes) + [target] for m in c.terms})
    rows, _ = coefficient_matrix(classes, monos)
    vector, _ = coefficient_matrix([target], monos)
    return solve_in_span(rows, vector[0], target.prime) is not None


def B_generators(n: int, prime: int) -> List[Tuple[str, CohomClass]]:
    """The algebra generators q_{n,i}, R_{n;s}, R_{n;s,t} of B[n] with labels."""
    gens = [(f"q_{n},{i}", dickson_q(n, i, prime)) for i in range(n)]
    gens += [(f"R_{n};{s}", mui_R(n, (s,), prime)) for s in range(n)]
    gens += [(f"R_{n};{s},{t}", mui_R(n, (s, t), prime)) for s in range(n) for t in range(s + 1, n)]
    return gens


def B_span(n: int, d: int, prime: int) -> List[CohomClass]:
    return [invariant_monomial(I, prime) for I in basis_B(n, 0, d, prime)]


def steenrod_closure_failures(n: int, degree: int, prime: int) -> List[str]:
    """beta^eps P^k g for every generator g of B[n], up to degree; labels of images outside B[n]."""
    q = prime - 1
    bad = []
    for label, g in B_generators(n, prime):
        base = g.degree()
        k = 0
        while base + 2 * k * q <= degree:
            for eps in (0, 1):
                image = steenrod_up(eps, k, g)
                d = base + 2 * k * q + eps
                if d <= degree and not in_span(B_span(n, d, prime), image):
                    bad.append(f"beta^{eps} P^{k} {label}")
            k += 1
    return bad


def v_product_by_division(n: int, prime: int) -> CohomClass:
    """V_n as L_n / L_{n-1}, with L_{n-1} in the first n - 1 variables."""
    return exact_divide(dickson_Ln(n, prime), embed(dickson_Ln(n - 1, prime), n))


def check_division_agrees(n: int, prime: int) -> bool:
    """Recurrence and L_{n,i}/L_n agree for every i."""
    for i in range(n + 1):
        try:
            if dickson_q(n, i, prime) != dickson_q_by_division(n, i, prime):
                return False
        except DivisionError:
            return False
    return True
