"""
Dyer-Lashof Algebra
===================

Strings (eps_1, i_1, ..., eps_n, i_n) standing for
beta^{eps_1} Q^{i_1} ... beta^{eps_n} Q^{i_n}: degree, excess,
admissibility, Adem rewriting to admissible normal form, Nishida
migration of dual Steenrod operations, the R_k[n] bases, May's
decomposition and the correspondence Phi with B[n].
"""

from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Tuple, Union
import hashlib
import json
import logging
import math
import os
import re
import threading

from sympy import Matrix

from .biv_algebra import CohomClass, compositions
from .errors import HopfRingError, ParseError, StringError
from .fp_core import binom, check_prime, sign
from .invariants import dickson_q, mui_R

logger = logging.getLogger(__name__)

Pair = Tuple[int, int]
Word = Tuple[Pair, ...]

MAX_REWRITE_DEPTH = 400


# -- strings ----------------------------------------------------------------

def word_degree(word: Sequence[Pair], prime: int) -> int:
    return sum(2 * (prime - 1) * i - e for e, i in word)


def word_excess(word: Sequence[Pair], prime: int) -> Union[int, float]:
    """2 i_1 - eps_1 - deg(tail); the empty word has infinite excess."""
    if not word:
        return math.inf
    e, i = word[0]
    return 2 * i - e - word_degree(word[1:], prime)


def word_is_admissible(word: Sequence[Pair], prime: int) -> bool:
    return all(prime * word[k][1] - word[k][0] >= word[k - 1][1] for k in range(1, len(word)))


def word_vanishes(word: Sequence[Pair], prime: int) -> bool:
    """Zero in the quotient by negative excess: bad indices or a tail of negative excess."""
    if any(i < e or i < 0 for e, i in word):
        return True
    return any(word_excess(word[t:], prime) < 0 for t in range(len(word)))


@dataclass(frozen=True)
class DLString:
    """An operation string with i_j >= eps_j."""
    pairs: Word

    def __post_init__(self):
        pairs = tuple((int(e), int(i)) for e, i in self.pairs)
        for e, i in pairs:
            if e not in (0, 1) or i < e:
                raise StringError(f"invalid pair ({e}, {i}) in {pairs}")
        object.__setattr__(self, 'pairs', pairs)

    @classmethod
    def of(cls, *flat: int) -> 'DLString':
        if len(flat) % 2:
            raise StringError("flat string must have even length")
        return cls(tuple(zip(flat[0::2], flat[1::2])))

    @property
    def length(self) -> int:
        return len(self.pairs)

    @property
    def b(self) -> int:
        return sum(e for e, _ in self.pairs)

    @property
    def first_epsilon(self) -> int:
        return self.pairs[0][0] if self.pairs else 0

    def degree(self, prime: int) -> int:
        return word_degree(self.pairs, prime)

    def excess(self, prime: int) -> Union[int, float]:
        return word_excess(self.pairs, prime)

    def is_admissible(self, prime: int) -> bool:
        return word_is_admissible(self.pairs, prime)

    def __add__(self, other: 'DLString') -> 'DLString':
        """Entrywise sum: indices add, epsilons add mod 2."""
        if self.length != other.length:
            raise StringError("strings of different length")
        return DLString(tuple(((e1 + e2) % 2, i1 + i2) for (e1, i1), (e2, i2) in zip(self.pairs, other.pairs)))

    def scaled(self, t: int) -> 'DLString':
        if any(e for e, _ in self.pairs) and t != 1:
            raise StringError("only epsilon-free strings can be scaled")
        return DLString(tuple((e, t * i) for e, i in self.pairs))

    def flat(self) -> Tuple[int, ...]:
        return tuple(x for pair in self.pairs for x in pair)

    def __str__(self) -> str:
        return format_word(self.pairs)


def excess(s: Union[DLString, Sequence[Pair]], prime: int) -> Union[int, float]:
    """Excess of a string; +inf for the empty string."""
    pairs = s.pairs if isinstance(s, DLString) else tuple(s)
    return word_excess(pairs, prime)


def format_word(word: Sequence[Pair]) -> str:
    if not word:
        return "1"
    return " ".join(("bQ" if e else "Q") + str(i) for e, i in word)


_TOKEN = re.compile(r"(b|β)?Q(\d+)$")


def parse_word(text: str) -> Word:
    """
    Parse tokens such as "Q5 Q1" or "bQ4 Q2".

    Raises:
        ParseError: with the character position of the offending token
    """
    pairs = []
    position = 0
    for token in re.split(r"(\s+)", text):
        if not token or token.isspace():
            position += len(token)
            continue
        match = _TOKEN.match(token)
        if not match:
            raise ParseError(f"unrecognised token {token!r}", position)
        pairs.append((1 if match.group(1) else 0, int(match.group(2))))
        position += len(token)
    if not pairs:
        raise ParseError("empty word", 0)
    return tuple(pairs)


# -- elements ---------------------------------------------------------------

class DLElement:
    """F_p-combination of admissible strings of non-negative excess."""

    __slots__ = ('terms', 'prime')

    def __init__(self, terms: Optional[Dict[Word, int]] = None, prime: int = 3):
        self.prime = prime
        self.terms: Dict[Word, int] = {}
        for word, coef in (terms or {}).items():
            self._accumulate(tuple(word), coef)

    def _accumulate(self, word: Word, coef: int) -> None:
        value = (self.terms.get(word, 0) + coef) % self.prime
        if value:
            self.terms[word] = value
        else:
            self.terms.pop(word, None)

    def __add__(self, other: 'DLElement') -> 'DLElement':
        result = DLElement(dict(self.terms), self.prime)
        for word, coef in other.terms.items():
            result._accumulate(word, coef)
        return result

    def scale(self, factor: int) -> 'DLElement':
        return DLElement({w: c * factor for w, c in self.terms.items()}, self.prime)

    def __eq__(self, other) -> bool:
        if isinstance(other, int) and other == 0:
            return not self.terms
        if not isinstance(other, DLElement):
            return NotImplemented
        return self.prime == other.prime and self.terms == other.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __iter__(self) -> Iterator[Tuple[Word, int]]:
        return iter(sorted(self.terms.items()))

    def strings(self) -> List[DLString]:
        return [DLString(w) for w, _ in self]

    def to_dict(self) -> Dict:
        return {
            "prime": self.prime,
            "terms": [{"string": [list(pair) for pair in word], "coef": coef} for word, coef in self],
        }

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for idx, (word, coef) in enumerate(self):
            signed = coef - self.prime if coef > self.prime // 2 else coef
            magnitude = "" if abs(signed) == 1 else f"{abs(signed)} "
            if idx == 0:
                parts.append(("-" if signed < 0 else "") + magnitude + format_word(word))
            else:
                parts.append(("- " if signed < 0 else "+ ") + magnitude + format_word(word))
        return " ".join(parts)

    def __repr__(self) -> str:
        return f"DLElement({self}, p={self.prime})"


# -- Adem relations ---------------------------------------------------------

def adem_pair(first: Pair, second: Pair, prime: int) -> List[Tuple[int, Word]]:
    """
    Rewrite an inadmissible pair beta^{e1} Q^r beta^{e2} Q^s.

    Returns:
        List of (coefficient, two-letter word)
    """
    (e1, r), (e2, s) = first, second
    p = prime
    terms: List[Tuple[int, Word]] = []
    lo = -(-r // p)
    for i in range(lo, r + s + 1):
        sgn = sign(r + i)
        if e2 == 0:
            c = binom((p - 1) * (i - s) - 1, p * i - r, p)
            if c:
                terms.append((sgn * c, ((e1, r + s - i), (0, i))))
            continue
        if e1 == 0:
            c = binom((p - 1) * (i - s), p * i - r, p)
            if c:
                terms.append((sgn * c, ((1, r + s - i), (0, i))))
        c = binom((p - 1) * (i - s) - 1, p * i - r - 1, p)
        if c:
            terms.append((-sgn * c, ((e1, r + s - i), (1, i))))
    return terms


def _inadmissible_position(word: Word, prime: int, strategy: str) -> Optional[int]:
    positions = [k for k in range(1, len(word)) if prime * word[k][1] - word[k][0] < word[k - 1][1]]
    if not positions:
        return None
    return positions[0] if strategy == 'leftmost' else positions[-1]


_NORMAL_FORMS: Dict[Tuple[Word, int, str], Dict[Word, int]] = {}
_NORMAL_FORMS_LOCK = threading.Lock()


def _normal_form(word: Word, prime: int, strategy: str, depth: int = 0) -> Dict[Word, int]:
    if depth > MAX_REWRITE_DEPTH:
        raise HopfRingError(f"Adem rewriting of {format_word(word)} did not terminate")
    key = (word, prime, strategy)
    with _NORMAL_FORMS_LOCK:
        cached = _NORMAL_FORMS.get(key)
    if cached is not None:
        return cached
    if word_vanishes(word, prime):
        result: Dict[Word, int] = {}
    else:
        k = _inadmissible_position(word, prime, strategy)
        if k is None:
            result = {word: 1}
        else:
            result = {}
            for coef, pair in adem_pair(word[k - 1], word[k], prime):
                rewritten = word[:k - 1] + pair + word[k + 1:]
                for w, c in _normal_form(rewritten, prime, strategy, depth + 1).items():
                    result[w] = (result.get(w, 0) + coef * c) % prime
            result = {w: c for w, c in result.items() if c}
    with _NORMAL_FORMS_LOCK:
        _NORMAL_FORMS[key] = result
    return result


def _cache_file(word: Word, prime: int, strategy: str) -> Optional[Path]:
    root = os.getenv('HOPFRING_CACHE_DIR')
    if not root:
        return None
    digest = hashlib.sha256(json.dumps([prime, strategy, word]).encode('utf-8')).hexdigest()
    return Path(root) / 'adem' / f"{digest}.json"


def adem_reduce(word: Union[str, Sequence[Pair], DLString], prime: int,
                strategy: str = 'leftmost') -> DLElement:
    """
    Admissible normal form of a word.

    Args:
        word: Pairs (eps, i), a DLString, or a token string "Q5 Q1"
        prime: Odd prime
        strategy: 'leftmost' or 'rightmost' inadmissible pair first

    Returns:
        DLElement with admissible, non-negative excess terms
    """
    check_prime(prime)
    if strategy not in ('leftmost', 'rightmost'):
        raise HopfRingError(f"unknown rewrite strategy {strategy!r}")
    if isinstance(word, str):
        word = parse_word(word)
    elif isinstance(word, DLString):
        word = word.pairs
    word = tuple((int(e), int(i)) for e, i in word)

    path = _cache_file(word, prime, strategy)
    if path is not None and path.exists():
        try:
            stored = json.loads(path.read_text())
            return DLElement({tuple(tuple(pair) for pair in w): c for w, c in stored}, prime)
        except (OSError, ValueError) as e:
            logger.warning(f"Ignoring unreadable Adem cache file {path}: {e}")

    result = DLElement(_normal_form(word, prime, strategy), prime)

    if path is not None:
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text(json.dumps([[list(map(list, w)), c] for w, c in result]))
        except OSError as e:
            logger.warning(f"Could not write Adem cache file {path}: {e}")
    return result


def reduce_product(left: DLElement, right: DLElement, strategy: str = 'leftmost') -> DLElement:
    """Normal form of the composite left . right."""
    result = DLElement({}, left.prime)
    for w1, c1 in left:
        for w2, c2 in right:
            result = result + adem_reduce(w1 + w2, left.prime, strategy).scale(c1 * c2)
    return result


def clear_cache() -> None:
    with _NORMAL_FORMS_LOCK:
        _NORMAL_FORMS.clear()


# -- Nishida relations ------------------------------------------------------

def nishida_step(r: int, letter: Pair, prime: int) -> List[Tuple[int, Pair, Tuple[int, int]]]:
    """
    P^r_* beta^e Q^s = sum of c * beta^{e'} Q^{s'} P^i_* beta^{d}.

    Returns:
        List of (c, (e', s'), (i, d))
    """
    e, s = letter
    p = prime
    terms = []
    for i in range(r // p + 1):
        sgn = sign(r + i)
        if e == 0:
            c = binom((p - 1) * (s - r), r - p * i, p)
            if c:
                terms.append((sgn * c, (0, s - r + i), (i, 0)))
            continue
        c = binom((p - 1) * (s - r) - 1, r - p * i, p)
        if c:
            terms.append((sgn * c, (1, s - r + i), (i, 0)))
        c = binom((p - 1) * (s - r) - 1, r - p * i - 1, p)
        if c:
            terms.append((sgn * c, (0, s - r + i), (i, 1)))
    return terms


@dataclass(frozen=True)
class NishidaWord:
    """P^r_* beta^eps followed by the Dyer-Lashof word; operators act on the left."""
    r: int
    eps: int
    word: Word


def nishida_migrate(w: NishidaWord, prime: int) -> Dict[Tuple[Word, Tuple[int, int]], int]:
    """
    Move P^r_* beta^eps past every Q of the word.

    Returns:
        {(admissible Q-word K, (i, d)): c} meaning sum c * Q^K P^i_* beta^d
    """
    check_prime(prime)
    p = prime
    # states: (prefix, pending r, pending beta) -> coef
    states: Dict[Tuple[Word, int, int], int] = {((), w.r, w.eps): 1}
    for letter in w.word:
        following: Dict[Tuple[Word, int, int], int] = {}
        for (prefix, r, d), coef in states.items():
            e, s = letter
            if d:
                if e:
                    continue
                e = 1
            for c, new_letter, (i, d2) in nishida_step(r, (e, s), p):
                key = (prefix + (new_letter,), i, d2)
                following[key] = (following.get(key, 0) + coef * c) % p
        states = {k: c for k, c in following.items() if c}
    result: Dict[Tuple[Word, Tuple[int, int]], int] = {}
    for (prefix, r, d), coef in states.items():
        for word, c in adem_reduce(prefix, p) if prefix else [((), 1)]:
            key = (word, (r, d))
            result[key] = (result.get(key, 0) + coef * c) % p
    return {k: c for k, c in result.items() if c}


# -- special strings and May's decomposition --------------------------------

def special_strings(n: int, family: str, params: Sequence[int], prime: int) -> DLString:
    """
    The strings I_{n,i}, J_{n;i} and K_{n;s,i} (indices 0-based).

    Args:
        n: Length
        family: 'I', 'J' or 'K'
        params: (i,) for I and J, (s, i) for K
        prime: Odd prime
    """
    p = prime
    if family in ('I', 'J'):
        (i,) = params
        s = None
    elif family == 'K':
        s, i = params
        if not 0 <= s < i:
            raise StringError(f"K needs 0 <= s < i, got s={s}, i={i}")
    else:
        raise StringError(f"unknown family {family!r}")
    if not 0 <= i <= n - 1:
        raise StringError(f"index {i} out of range for length {n}")
    pairs = []
    for j in range(n):
        value = p ** (i - 1 - j) * (p ** (n - i) - 1) if j < i else p ** (n - 1 - j)
        e = 0
        if family == 'J' and j == i:
            e = 1
        if family == 'K':
            if j < s:
                value -= p ** (s - 1 - j)
            if j in (s, i):
                e = 1
        pairs.append((e, value))
    return DLString(tuple(pairs))


def L_string(n: int, e: Sequence[int], prime: int) -> DLString:
    """Sum of K_{n;e1,e2} + ... (+ J_{n;e_last} when len(e) is odd); zeros when e is empty."""
    result = DLString(((0, 0),) * n)
    e = list(e)
    while len(e) >= 2:
        result = result + special_strings(n, 'K', (e[0], e[1]), prime)
        e = e[2:]
    if e:
        result = result + special_strings(n, 'J', (e[0],), prime)
    return result


def recompose(t: Sequence[int], e: Sequence[int], n: int, prime: int) -> DLString:
    result = L_string(n, e, prime)
    for i, ti in enumerate(t):
        if ti:
            result = result + special_strings(n, 'I', (i,), prime).scaled(ti)
    return result


def may_decompose(s: DLString, prime: int) -> Tuple[Tuple[int, ...], Tuple[int, ...]]:
    """
    Write s = sum t_i I_{n,i} + L_{n;e}.

    Returns:
        (t_0..t_{n-1}, e)

    Raises:
        StringError: if s is inadmissible, has negative excess, or has no decomposition
    """
    if not s.is_admissible(prime) or s.excess(prime) < 0:
        raise StringError(f"{s} must be admissible of non-negative excess")
    n = s.length
    e = tuple(j for j, (eps, _) in enumerate(s.pairs) if eps)
    L = L_string(n, e, prime)
    residual = [i - l for (_, i), (_, l) in zip(s.pairs, L.pairs)]
    columns = [list(special_strings(n, 'I', (i,), prime).flat()[1::2]) for i in range(n)]
    A = Matrix(columns).T
    solution = A.LUsolve(Matrix(residual))
    t = []
    for value in solution:
        if not value.is_integer or value < 0:
            raise StringError(f"{s} has no decomposition over I_{{{n},i}} + L_{{{n};{e}}}")
        t.append(int(value))
    return tuple(t), e


# -- R_k[n] basis -----------------------------------------------------------

def basis_R(n: int, k: int, d: int, prime: int) -> List[DLString]:
    """Admissible length-n strings of excess >= k and degree d."""
    if k < 0:
        raise StringError("cutoff k must be nonnegative")
    p = prime
    found = []
    for eps in _epsilon_vectors(n):
        b = sum(eps)
        if (d + b) % (2 * (p - 1)):
            continue
        total = (d + b) // (2 * (p - 1))
        floor = sum(eps)
        if total < floor:
            continue
        for shifted in compositions(total - floor, [None] * n):
            word = tuple((e, x + e) for e, x in zip(eps, shifted))
            if word_is_admissible(word, p) and word_excess(word, p) >= k:
                found.append(DLString(word))
    return sorted(found, key=lambda s: s.pairs)


def _epsilon_vectors(n: int) -> Iterator[Tuple[int, ...]]:
    for mask in range(2 ** n):
        yield tuple((mask >> j) & 1 for j in range(n))


# -- Phi correspondence -----------------------------------------------------

Factor = Tuple  # ('xi', i) | ('tau', i) | ('sigma', s, i)


def phi_map(factors: Iterable[Factor], n: int, prime: int) -> CohomClass:
    """
    Multiplicative extension of xi_{n,i} -> -q_{n,i}, tau_{n;i} -> R_{n;i},
    sigma_{n;s,i} -> R_{n;s,i}; factors are multiplied left to right.
    """
    result = CohomClass.one(n, prime)
    for factor in factors:
        name = factor[0]
        if name == 'xi':
            image = -dickson_q(n, factor[1], prime)
        elif name == 'tau':
            image = mui_R(n, (factor[1],), prime)
        elif name == 'sigma':
            image = mui_R(n, (factor[1], factor[2]), prime)
        else:
            raise StringError(f"unknown generator {name!r}")
        result = result * image
    return result


def phi_relations(n: int, prime: int) -> List[Tuple[str, CohomClass, CohomClass]]:
    """Images of both sides of every defining relation of the dual algebra R[n]^*."""
    relations = []
    for i in range(n):
        relations.append((f"tau_{i}^2=0", phi_map([('tau', i), ('tau', i)], n, prime),
                          CohomClass.zero(n, prime)))
    for s in range(n):
        for i in range(s + 1, n):
            relations.append((
                f"tau_{s}tau_{i}=sigma_{s},{i}xi_0",
                phi_map([('tau', s), ('tau', i)], n, prime),
                phi_map([('sigma', s, i), ('xi', 0)], n, prime),
            ))
            for j in range(i + 1, n):
                relations.append((
                    f"tau_{s}tau_{i}tau_{j}=tau_{s}sigma_{i},{j}xi_0",
                    phi_map([('tau', s), ('tau', i), ('tau', j)], n, prime),
                    phi_map([('tau', s), ('sigma', i, j), ('xi', 0)], n, prime),
                ))
                for l in range(j + 1, n):
                    relations.append((
                        f"tau_{s}tau_{i}tau_{j}tau_{l}=sigma_{s},{i}sigma_{j},{l}xi_0^2",
                        phi_map([('tau', s), ('tau', i), ('tau', j), ('tau', l)], n, prime),
                        phi_map([('sigma', s, i), ('sigma', j, l), ('xi', 0), ('xi', 0)], n, prime),
                    ))
    return relations


def dual_coproduct_E(eps: int, k: int) -> List[Tuple[Pair, Pair]]:
    """
    Index pairs of psi(E_{(eps,k)}): for eps=0 all (0,i) x (0,j) with i+j=k; for
    eps=1 and k>=1 all (0,i) x (1,j+1) and (1,i+1) x (0,j) with i+j=k-1.
    """
    if eps == 0:
        return [((0, i), (0, k - i)) for i in range(k + 1)]
    return ([((0, i), (1, k - i)) for i in range(k)]
            + [((1, i + 1), (0, k - 1 - i)) for i in range(k)])
