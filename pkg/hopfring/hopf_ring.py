"""
Hopf Ring Engine
================

The Hopf ring {H_*QS^k}: the star (loop sum) and circle (composition)
products, coproduct and antipode, the Dyer-Lashof operations beta^eps Q^s,
the dual Steenrod operations P^r_*, the generators E_{(eps,i)} and the
expansion of circle products of E's into admissible Q-monomials.

Terms of H_*QS^0 carry the component they live in: the key (m, mono)
stands for [m - c(mono)] * mono, where mono is a star monomial in
Q-generators and c(mono) is the component of that monomial (Q^I[1] sits in
component p^{len I}). At levels k >= 1 the label is always 0.
"""

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Any, Callable, Dict, Iterator, List, Optional, Sequence, Tuple, Union
import json
import logging
import threading

from .dyer_lashof import (
    DLString,
    adem_reduce,
    format_word,
    nishida_step,
    word_degree,
    word_excess,
    word_is_admissible,
)
from .errors import HopfRingError, RankMismatchError, StringError, TruncationOverflow
from .fp_core import check_prime, fp_inverse, sign
from .invariants import IndexString

logger = logging.getLogger(__name__)

Pair = Tuple[int, int]
Word = Tuple[Pair, ...]


@lru_cache(maxsize=None)
def _generator_degree(word: Word, level: int, prime: int) -> int:
    return word_degree(word, prime) + level


def is_generator_word(word: Sequence[Pair], level: int, prime: int) -> bool:
    """Admissible with exc + eps_1 > level; at level 0 the word must be nonempty."""
    word = tuple(word)
    if not word:
        return level >= 1
    if any(i < e for e, i in word):
        return False
    return word_is_admissible(word, prime) and word_excess(word, prime) + word[0][0] > level


@dataclass(frozen=True, order=True)
class QGenerator:
    """
    The polynomial generator Q^I[1] (level 0) or Q^I(sigma^{o k}) (level k).

    At level k >= 1 the empty word is sigma^{o k} itself.
    """
    word: Word
    level: int = 0

    def __post_init__(self):
        object.__setattr__(self, 'word', tuple((int(e), int(i)) for e, i in self.word))
        if self.level < 0:
            raise HopfRingError(f"negative level {self.level}")
        if self.level == 0 and not self.word:
            raise StringError("[1] is a component class, not a generator")

    def validate(self, prime: int) -> 'QGenerator':
        if not is_generator_word(self.word, self.level, prime):
            raise StringError(f"{format_word(self.word)} does not give a generator at level {self.level}")
        return self

    def degree(self, prime: int) -> int:
        return _generator_degree(self.word, self.level, prime)

    def component(self, prime: int) -> int:
        return prime ** len(self.word) if self.level == 0 else 0

    def is_odd(self, prime: int) -> bool:
        return self.degree(prime) % 2 == 1

    def tail(self) -> Optional['QGenerator']:
        """The generator one letter shorter, or None when it is the base class."""
        rest = self.word[1:]
        if not rest and self.level == 0:
            return None
        return QGenerator(rest, self.level)

    def to_dict(self) -> Dict[str, Any]:
        return {"string": [list(pair) for pair in self.word]}

    def __str__(self) -> str:
        if self.level == 0:
            return f"{format_word(self.word)}[1]"
        base = "sigma" if self.level == 1 else f"sigma^{self.level}"
        return f"{format_word(self.word)}({base})" if self.word else base


Mono = Tuple[Tuple[QGenerator, int], ...]
TermKey = Tuple[int, Mono]


def mono_component(mono: Mono, prime: int) -> int:
    return sum(e * g.component(prime) for g, e in mono)


def mono_degree(mono: Mono, prime: int) -> int:
    return sum(e * g.degree(prime) for g, e in mono)


class HopfElement:
    """Sparse F_p-combination of component-labelled star monomials at one level."""

    __slots__ = ('level', 'prime', 'terms')

    def __init__(self, level: int, prime: int, terms: Optional[Dict[TermKey, int]] = None):
        self.level = level
        self.prime = prime
        self.terms: Dict[TermKey, int] = {}
        for key, coef in (terms or {}).items():
            self._accumulate(key, coef)

    @classmethod
    def zero(cls, level: int, prime: int) -> 'HopfElement':
        return cls(level, prime)

    def _accumulate(self, key: TermKey, coef: int) -> None:
        value = (self.terms.get(key, 0) + coef) % self.prime
        if value:
            self.terms[key] = value
        else:
            self.terms.pop(key, None)

    def _absorb(self, other: 'HopfElement', factor: int = 1) -> 'HopfElement':
        """In-place self += factor * other; only for freshly built elements."""
        if not other.terms:
            return self
        self._check(other)
        for key, coef in other.terms.items():
            self._accumulate(key, factor * coef)
        return self

    def _check(self, other: 'HopfElement') -> None:
        if self.level != other.level or self.prime != other.prime:
            raise RankMismatchError(
                f"cannot combine level {self.level} (p={self.prime}) with level {other.level} (p={other.prime})")

    # -- gradings -----------------------------------------------------

    def term_degree(self, key: TermKey) -> int:
        return mono_degree(key[1], self.prime)

    def degrees(self) -> List[int]:
        return sorted({self.term_degree(key) for key in self.terms})

    def degree(self) -> Optional[int]:
        """The degree of a nonzero homogeneous element, else None."""
        degrees = self.degrees()
        return degrees[0] if len(degrees) == 1 else None

    def max_degree(self) -> int:
        return max(self.degrees(), default=0)

    def homogeneous_part(self, d: int) -> 'HopfElement':
        return HopfElement(self.level, self.prime,
                           {k: c for k, c in self.terms.items() if self.term_degree(k) == d})

    def augmentation(self) -> int:
        """epsilon: [m] -> 1 at level 0, the unit -> 1 above, positive degrees -> 0."""
        return sum(c for (_, mono), c in self.terms.items() if not mono) % self.prime

    def coefficient(self, key: TermKey) -> int:
        return self.terms.get(key, 0)

    # -- linear structure ---------------------------------------------

    def __add__(self, other: 'HopfElement') -> 'HopfElement':
        self._check(other)
        return HopfElement(self.level, self.prime, dict(self.terms))._absorb(other)

    def __sub__(self, other: 'HopfElement') -> 'HopfElement':
        self._check(other)
        return HopfElement(self.level, self.prime, dict(self.terms))._absorb(other, -1)

    def __neg__(self) -> 'HopfElement':
        return self.scale(-1)

    def scale(self, factor: int) -> 'HopfElement':
        return HopfElement(self.level, self.prime, {k: factor * c for k, c in self.terms.items()})

    def __mul__(self, factor: int) -> 'HopfElement':
        if not isinstance(factor, int):
            return NotImplemented
        return self.scale(factor)

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if isinstance(other, int) and other == 0:
            return not self.terms
        if not isinstance(other, HopfElement):
            return NotImplemented
        return self.level == other.level and self.prime == other.prime and self.terms == other.terms

    __hash__ = None

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __len__(self) -> int:
        return len(self.terms)

    def __iter__(self) -> Iterator[Tuple[TermKey, int]]:
        return iter(sorted(self.terms.items()))

    def key(self) -> Tuple:
        """Hashable canonical form, used as a memo key."""
        return (self.level, self.prime, tuple(sorted(self.terms.items())))

    # -- serialisation ------------------------------------------------

    def to_dict(self) -> Dict[str, Any]:
        terms = []
        for (m, mono), coef in self:
            factors = []
            for g, e in mono:
                factors.extend([g.to_dict()] * e)
            terms.append({"component": m, "factors": factors, "coef": coef})
        return {"level": self.level, "terms": terms}

    @classmethod
    def from_dict(cls, data: Dict[str, Any], prime: int = 3) -> 'HopfElement':
        level = int(data["level"])
        result = cls(level, prime)
        for term in data["terms"]:
            counts: Dict[QGenerator, int] = {}
            for factor in term["factors"]:
                g = QGenerator(tuple(tuple(pair) for pair in factor["string"]), level)
                counts[g] = counts.get(g, 0) + 1
            result._accumulate((int(term.get("component", 0)), tuple(sorted(counts.items()))), int(term["coef"]))
        return result

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str, prime: int = 3) -> 'HopfElement':
        return cls.from_dict(json.loads(text), prime)

    def _format_term(self, key: TermKey) -> str:
        m, mono = key
        parts = []
        offset = m - mono_component(mono, self.prime)
        if self.level == 0 and (offset or not mono):
            parts.append(f"[{offset}]")
        elif self.level > 0 and not mono:
            parts.append("1")
        for g, e in mono:
            parts.append(str(g) if e == 1 else f"({g})^{e}")
        return " * ".join(parts)

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        pieces = []
        for idx, (key, coef) in enumerate(self):
            signed = coef - self.prime if coef > self.prime // 2 else coef
            magnitude = "" if abs(signed) == 1 else f"{abs(signed)} "
            lead = ("-" if signed < 0 else "") if idx == 0 else ("- " if signed < 0 else "+ ")
            pieces.append(lead + magnitude + self._format_term(key))
        return " ".join(pieces)

    def __repr__(self) -> str:
        return f"HopfElement(level={self.level}, {self})"


class HopfTensor:
    """Element of H_*QS^k (x) H_*QS^k: pairs of term keys with coefficients."""

    __slots__ = ('level', 'prime', 'terms')

    def __init__(self, level: int, prime: int, terms: Optional[Dict[Tuple[TermKey, TermKey], int]] = None):
        self.level = level
        self.prime = prime
        self.terms: Dict[Tuple[TermKey, TermKey], int] = {}
        for key, coef in (terms or {}).items():
            self._accumulate(key, coef)

    def _accumulate(self, key: Tuple[TermKey, TermKey], coef: int) -> None:
        value = (self.terms.get(key, 0) + coef) % self.prime
        if value:
            self.terms[key] = value
        else:
            self.terms.pop(key, None)

    def _absorb(self, other: 'HopfTensor', factor: int = 1) -> 'HopfTensor':
        for key, coef in other.terms.items():
            self._accumulate(key, factor * coef)
        return self

    def __add__(self, other: 'HopfTensor') -> 'HopfTensor':
        if self.level != other.level:
            raise RankMismatchError("tensors of different levels")
        return HopfTensor(self.level, self.prime, dict(self.terms))._absorb(other)

    def __sub__(self, other: 'HopfTensor') -> 'HopfTensor':
        if self.level != other.level:
            raise RankMismatchError("tensors of different levels")
        return HopfTensor(self.level, self.prime, dict(self.terms))._absorb(other, -1)

    def scale(self, factor: int) -> 'HopfTensor':
        return HopfTensor(self.level, self.prime, {k: factor * c for k, c in self.terms.items()})

    def __eq__(self, other) -> bool:
        if isinstance(other, int) and other == 0:
            return not self.terms
        if not isinstance(other, HopfTensor):
            return NotImplemented
        return self.level == other.level and self.terms == other.terms

    __hash__ = None

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __iter__(self) -> Iterator[Tuple[Tuple[TermKey, TermKey], int]]:
        return iter(sorted(self.terms.items()))

    def factors(self) -> Iterator[Tuple[HopfElement, HopfElement, int]]:
        for (left, right), coef in self:
            yield (HopfElement(self.level, self.prime, {left: 1}),
                   HopfElement(self.level, self.prime, {right: 1}), coef)

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        return " + ".join(f"{c} ({l}) (x) ({r})" for l, r, c in self.factors())


@dataclass
class EProductExpansion:
    """sigma^{o k} o E o ... o E expanded, with its predicted leading term."""
    level: int
    index: IndexString
    prime: int
    value: HopfElement
    leading: DLString
    expected_sign: int
    leading_coefficient: int
    residual: Dict[Word, int] = field(default_factory=dict)

    @property
    def excess_bound(self) -> int:
        return 2 * self.index.indices[0] + self.index.b

    @property
    def leading_matches(self) -> bool:
        return (self.leading_coefficient - self.expected_sign) % self.prime == 0

    def residual_violations(self) -> List[Word]:
        return [w for w in self.residual if word_excess(w, self.prime) >= self.excess_bound]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "level": self.level,
            "index": list(self.index.flat()),
            "leading": [list(pair) for pair in self.leading.pairs],
            "expected_sign": self.expected_sign,
            "leading_coefficient": self.leading_coefficient,
            "residual": [{"string": [list(p) for p in w], "coef": c} for w, c in sorted(self.residual.items())],
            "value": self.value.to_dict(),
        }


class HopfRing:
    """
    Computation engine for {H_*QS^k} at an odd prime.

    All results are memoized per engine; the caches are shared between
    threads and guarded by one lock. Any product or operation whose degree
    would exceed degree_max raises TruncationOverflow.
    """

    def __init__(self, prime: int = 3, degree_max: int = 60):
        self.prime = check_prime(prime)
        if degree_max < 1:
            raise HopfRingError("degree_max must be positive")
        self.degree_max = degree_max
        self._lock = threading.Lock()
        self._caches: Dict[str, Dict[Any, Any]] = {
            name: {} for name in ('q_gen', 'q_term', 'q_comp', 'p_gen', 'psi', 'chi', 'circle')
        }
        logger.debug(f"HopfRing(p={prime}, degree_max={degree_max})")

    # -- caches -------------------------------------------------------

    def _memo(self, cache: str, key: Any, compute: Callable[[], Any]) -> Any:
        with self._lock:
            hit = self._caches[cache].get(key)
        if hit is not None:
            return hit
        value = compute()
        with self._lock:
            self._caches[cache][key] = value
        return value

    def cache_sizes(self) -> Dict[str, int]:
        with self._lock:
            return {name: len(cache) for name, cache in self._caches.items()}

    def clear_caches(self) -> None:
        with self._lock:
            for cache in self._caches.values():
                cache.clear()

    def _guard(self, degree: int, what: str) -> None:
        if degree > self.degree_max:
            raise TruncationOverflow(degree, self.degree_max, what)

    # -- constructors -------------------------------------------------

    def zero(self, level: int = 0) -> HopfElement:
        return HopfElement(level, self.prime)

    def unit(self, level: int = 0) -> HopfElement:
        """The star unit: [0] at level 0, 1 above."""
        return HopfElement(level, self.prime, {(0, ()): 1})

    def component(self, m: int) -> HopfElement:
        return HopfElement(0, self.prime, {(m, ()): 1})

    def base(self, level: int) -> HopfElement:
        """[1] at level 0, sigma^{o k} at level k."""
        return self.component(1) if level == 0 else self.sigma(level)

    def sigma(self, k: int) -> HopfElement:
        if k == 0:
            return self.component(1)
        return self._gen_element(QGenerator((), k))

    def _gen_element(self, g: QGenerator, power: int = 1) -> HopfElement:
        return HopfElement(g.level, self.prime, {(power * g.component(self.prime), ((g, power),)): 1})

    def _mono_element(self, mono: Sequence[Tuple[QGenerator, int]], level: int, offset: int = 0) -> HopfElement:
        mono = tuple(sorted((g, e) for g, e in mono if e))
        m = offset + mono_component(mono, self.prime) if level == 0 else 0
        return HopfElement(level, self.prime, {(m, mono): 1})

    def _term(self, key: TermKey, level: int) -> HopfElement:
        return HopfElement(level, self.prime, {key: 1})

    def generator(self, word: Union[str, Sequence[Pair], DLString], level: int = 0) -> HopfElement:
        """Q^I applied to the base class; inadmissible words are reduced first."""
        if isinstance(word, DLString):
            word = word.pairs
        word = tuple((int(e), int(i)) for e, i in word)
        return self.evaluate_word(word, level)

    def E(self, eps: int, i: int) -> HopfElement:
        """E_{(eps,i)} = (-1)^i beta^eps Q^i[1]; zero when i < eps."""
        if eps not in (0, 1):
            raise HopfRingError(f"epsilon must be 0 or 1, got {eps}")
        if i < eps:
            return self.zero(0)
        return self.q_act(eps, i, self.component(1)).scale(sign(i))

    def _offset(self, key: TermKey, level: int) -> int:
        return key[0] - mono_component(key[1], self.prime) if level == 0 else 0

    # -- star product -------------------------------------------------

    def _star_keys(self, k1: TermKey, k2: TermKey) -> Optional[Tuple[int, TermKey]]:
        (m1, mono1), (m2, mono2) = k1, k2
        p = self.prime
        sgn = 1
        odd_right = [g for g, _ in mono2 if g.is_odd(p)]
        if odd_right:
            for g, _ in mono1:
                if g.is_odd(p):
                    for h in odd_right:
                        if h == g:
                            return None
                        if h < g:
                            sgn = -sgn
        counts = dict(mono1)
        for g, e in mono2:
            counts[g] = counts.get(g, 0) + e
        return sgn, (m1 + m2, tuple(sorted(counts.items())))

    def star(self, a: HopfElement, b: HopfElement) -> HopfElement:
        """Graded-commutative loop-sum product; components add."""
        a._check(b)
        result = HopfElement(a.level, self.prime)
        for k1, c1 in a.terms.items():
            for k2, c2 in b.terms.items():
                merged = self._star_keys(k1, k2)
                if merged is not None:
                    sgn, key = merged
                    result._accumulate(key, sgn * c1 * c2)
        return result

    def star_power(self, a: HopfElement, e: int) -> HopfElement:
        if e < 0:
            raise HopfRingError("negative star power; use components for inverses")
        result = self.unit(a.level)
        base = a
        while e:
            if e & 1:
                result = self.star(result, base)
            e >>= 1
            if e:
                base = self.star(base, base)
        return result

    # -- tensors ------------------------------------------------------

    def tensor(self, a: HopfElement, b: HopfElement) -> HopfTensor:
        a._check(b)
        return HopfTensor(a.level, self.prime,
                          {(k1, k2): c1 * c2 for k1, c1 in a.terms.items() for k2, c2 in b.terms.items()})

    def tensor_star(self, x: HopfTensor, y: HopfTensor) -> HopfTensor:
        """(a (x) b) * (c (x) d) = (-1)^{|b||c|} (a*c) (x) (b*d)."""
        p = self.prime
        result = HopfTensor(x.level, p)
        for (l1, r1), c1 in x.terms.items():
            deg_r1 = mono_degree(r1[1], p)
            for (l2, r2), c2 in y.terms.items():
                left = self._star_keys(l1, l2)
                if left is None:
                    continue
                right = self._star_keys(r1, r2)
                if right is None:
                    continue
                sgn = left[0] * right[0] * sign(deg_r1 * mono_degree(l2[1], p))
                result._accumulate((left[1], right[1]), sgn * c1 * c2)
        return result

    def tensor_circle(self, x: HopfTensor, y: HopfTensor) -> HopfTensor:
        """(a (x) b) o (c (x) d) = (-1)^{|b||c|} (a o c) (x) (b o d)."""
        p = self.prime
        result = HopfTensor(x.level + y.level, p)
        for a, b, c1 in x.factors():
            for c, d, c2 in y.factors():
                sgn = sign(b.max_degree() * c.max_degree())
                result._absorb(self.tensor(self.circle(a, c), self.circle(b, d)), sgn * c1 * c2)
        return result

    def tensor_map(self, t: HopfTensor, left: Callable[[HopfElement], HopfElement],
                   right: Callable[[HopfElement], HopfElement]) -> HopfTensor:
        """Apply even maps factorwise (no Koszul signs)."""
        result: Optional[HopfTensor] = None
        for a, b, coef in t.factors():
            image = self.tensor(left(a), right(b)).scale(coef)
            result = image if result is None else result._absorb(image)
        return result if result is not None else HopfTensor(t.level, self.prime)

    def _tensor_bockstein(self, t: HopfTensor) -> HopfTensor:
        result = HopfTensor(t.level, self.prime)
        for a, b, coef in t.factors():
            result._absorb(self.tensor(self.bockstein(a), b), coef)
            result._absorb(self.tensor(a, self.bockstein(b)), coef * sign(a.max_degree()))
        return result

    # -- Bockstein ----------------------------------------------------

    def _bockstein_generator(self, g: QGenerator) -> HopfElement:
        if not g.word or g.word[0][0] == 1:
            return self.zero(g.level)
        (_, s), rest = g.word[0], g.word[1:]
        return self._gen_element(QGenerator(((1, s),) + rest, g.level))

    def bockstein(self, a: HopfElement) -> HopfElement:
        """beta as a graded derivation of the star product."""
        p = self.prime
        result = HopfElement(a.level, p)
        for key, coef in a.terms.items():
            mono = key[1]
            offset = self._offset(key, a.level)
            before = 0
            for idx, (g, e) in enumerate(mono):
                bg = self._bockstein_generator(g)
                if bg:
                    prefix = self._mono_element(mono[:idx], a.level, offset)
                    middle = self.star(self._mono_element(((g, e - 1),), a.level), bg)
                    suffix = self._mono_element(mono[idx + 1:], a.level)
                    piece = self.star(self.star(prefix, middle), suffix)
                    result._absorb(piece, coef * e * sign(before))
                before += e * g.degree(p)
        return result

    # -- Cartan expansions --------------------------------------------

    def _series_star(self, left: List[HopfElement], right: List[HopfElement], upto: int) -> List[HopfElement]:
        level = left[0].level if left else right[0].level
        out = [HopfElement(level, self.prime) for _ in range(upto + 1)]
        for i, a in enumerate(left[:upto + 1]):
            if not a:
                continue
            for j in range(min(len(right), upto - i + 1)):
                if right[j]:
                    out[i + j]._absorb(self.star(a, right[j]))
        return out

    def _series_power(self, series: List[HopfElement], e: int, upto: int) -> List[HopfElement]:
        level = series[0].level
        result = [self.unit(level)] + [HopfElement(level, self.prime) for _ in range(upto)]
        base = series[:upto + 1]
        while e:
            if e & 1:
                result = self._series_star(result, base, upto)
            e >>= 1
            if e:
                base = self._series_star(base, base, upto)
        return result

    def _cartan(self, key: TermKey, level: int, total: int,
                component_series: Callable[[int, int], List[HopfElement]],
                generator_series: Callable[[QGenerator, int], List[HopfElement]]) -> HopfElement:
        """Coefficient of t^total in the star product of the factor series of one term."""
        if level == 0:
            series = component_series(self._offset(key, level), total)
        else:
            series = [self.unit(level)]
        for g, e in key[1]:
            factor = generator_series(g, total)
            series = self._series_star(series, self._series_power(factor, e, total), total)
        return series[total] if total < len(series) else HopfElement(level, self.prime)

    # -- Dyer-Lashof operations ---------------------------------------

    def _q_component_series(self, j: int, upto: int) -> List[HopfElement]:
        """Q(t)[j] = (Q(t)[1])^{*j} up to t^upto."""
        def compute() -> List[HopfElement]:
            if j == 0:
                return [self.unit(0)]
            one = [self.component(self.prime)] + [
                self._gen_element(QGenerator(((0, i),), 0)) for i in range(1, upto + 1)]
            if j > 0:
                return self._series_power(one, j, upto)
            inverse = [self.component(-self.prime)]
            for n in range(1, upto + 1):
                acc = HopfElement(0, self.prime)
                for i in range(1, n + 1):
                    acc._absorb(self.star(one[i], inverse[n - i]))
                inverse.append(self.star(self.component(-self.prime), acc).scale(-1))
            return self._series_power(inverse, -j, upto)
        return self._memo('q_comp', (j, upto), compute)

    def _q_generator(self, g: QGenerator, s: int) -> HopfElement:
        """Q^s g for a single generator, with the allowability conventions."""
        def compute() -> HopfElement:
            p = self.prime
            d = g.degree(p)
            if 2 * s < d:
                return self.zero(g.level)
            if 2 * s == d:
                return self.star_power(self._gen_element(g), p)
            word = ((0, s),) + g.word
            if word_is_admissible(word, p):
                return self._gen_element(QGenerator(word, g.level))
            result = HopfElement(g.level, p)
            for w, coef in adem_reduce(word, p):
                result._absorb(self.evaluate_word(w, g.level), coef)
            return result
        return self._memo('q_gen', (g, s), compute)

    def _q_generator_series(self, g: QGenerator, upto: int) -> List[HopfElement]:
        return [self._q_generator(g, i) for i in range(upto + 1)]

    def _q_term(self, key: TermKey, level: int, s: int) -> HopfElement:
        return self._memo('q_term', (key, level, s), lambda: self._cartan(
            key, level, s, self._q_component_series, self._q_generator_series))

    def q_act(self, eps: int, s: int, a: HopfElement) -> HopfElement:
        """
        beta^eps Q^s a.

        Q^s x = 0 when 2s < deg x and x^{*p} when 2s = deg x; beta Q^s is the
        Bockstein of Q^s, so it vanishes when 2s <= deg x. Products expand by
        the Cartan formula over the star product.
        """
        if eps not in (0, 1):
            raise HopfRingError(f"epsilon must be 0 or 1, got {eps}")
        if s < 0 or not a:
            return self.zero(a.level)
        self._guard(a.max_degree() + 2 * s * (self.prime - 1) - eps, "Dyer-Lashof operation")
        result = HopfElement(a.level, self.prime)
        for key, coef in a.terms.items():
            if 2 * s >= self.term_degree(key):
                result._absorb(self._q_term(key, a.level, s), coef)
        return self.bockstein(result) if eps else result

    def term_degree(self, key: TermKey) -> int:
        return mono_degree(key[1], self.prime)

    def apply_word(self, word: Sequence[Pair], a: HopfElement) -> HopfElement:
        """Apply beta^{e_1} Q^{i_1} ... beta^{e_n} Q^{i_n} to a, innermost letter first."""
        for e, i in reversed(tuple(word)):
            a = self.q_act(e, i, a)
            if not a:
                break
        return a

    def evaluate_word(self, word: Sequence[Pair], level: int) -> HopfElement:
        word = tuple(word)
        if word and is_generator_word(word, level, self.prime):
            return self._gen_element(QGenerator(word, level))
        if not word:
            return self.base(level)
        if not word_is_admissible(word, self.prime):
            result = HopfElement(level, self.prime)
            for w, coef in adem_reduce(word, self.prime):
                result._absorb(self.evaluate_word(w, level), coef)
            return result
        return self.apply_word(word, self.base(level))

    # -- dual Steenrod operations -------------------------------------

    def _p_component_series(self, j: int, upto: int) -> List[HopfElement]:
        return [self.component(j)]

    def _p_generator(self, g: QGenerator, r: int) -> HopfElement:
        """P^r_* g through the Nishida relations."""
        def compute() -> HopfElement:
            p = self.prime
            if r == 0:
                return self._gen_element(g)
            if not g.word or 2 * r * (p - 1) > g.degree(p):
                return self.zero(g.level)
            letter = g.word[0]
            tail = g.tail()
            y = self._gen_element(tail) if tail is not None else self.base(g.level)
            result = HopfElement(g.level, p)
            for coef, (e2, s2), (i, d) in nishida_step(r, letter, p):
                z = self.steenrod_act(y, d, i)
                if z:
                    result._absorb(self.q_act(e2, s2, z), coef)
            return result
        return self._memo('p_gen', (g, r), compute)

    def _p_generator_series(self, g: QGenerator, upto: int) -> List[HopfElement]:
        return [self._p_generator(g, i) for i in range(upto + 1)]

    def steenrod_act(self, a: HopfElement, eps: int, r: int) -> HopfElement:
        """
        P^r_*(beta^eps a), written on the right as a beta^eps P^r.

        P^r_* is multiplicative over the star product (Cartan, no signs),
        kills [m] and sigma^{o k} for r > 0, and moves past Q's by Nishida.
        """
        if eps not in (0, 1):
            raise HopfRingError(f"epsilon must be 0 or 1, got {eps}")
        if r < 0:
            return self.zero(a.level)
        x = self.bockstein(a) if eps else a
        if r == 0:
            return x
        result = HopfElement(x.level, self.prime)
        for key, coef in x.terms.items():
            if 2 * r * (self.prime - 1) <= self.term_degree(key):
                result._absorb(self._cartan(key, x.level, r, self._p_component_series,
                                            self._p_generator_series), coef)
        return result

    # -- coproduct and antipode ---------------------------------------

    def _coproduct_generator(self, g: QGenerator) -> HopfTensor:
        def compute() -> HopfTensor:
            if not g.word:
                sigma, one = self._gen_element(g), self.unit(g.level)
                return self.tensor(sigma, one) + self.tensor(one, sigma)
            e, s = g.word[0]
            tail = g.tail()
            y = self._gen_element(tail) if tail is not None else self.base(g.level)
            result = HopfTensor(g.level, self.prime)
            for left, right, coef in self.coproduct(y).factors():
                for i in range(s + 1):
                    ql = self.q_act(0, i, left)
                    if not ql:
                        continue
                    qr = self.q_act(0, s - i, right)
                    if qr:
                        result._absorb(self.tensor(ql, qr), coef)
            return self._tensor_bockstein(result) if e else result
        return self._memo('psi', g, compute)

    def coproduct(self, a: HopfElement) -> HopfTensor:
        """psi: [m] grouplike, sigma^{o k} primitive, Cartan on Q's, multiplicative for *."""
        result = HopfTensor(a.level, self.prime)
        for key, coef in a.terms.items():
            offset = self._offset(key, a.level)
            t = HopfTensor(a.level, self.prime, {((offset, ()), (offset, ())): 1})
            for g, e in key[1]:
                tg = self._coproduct_generator(g)
                for _ in range(e):
                    t = self.tensor_star(t, tg)
            result._absorb(t, coef)
        return result

    def counit(self, a: HopfElement) -> int:
        return a.augmentation()

    def _antipode_generator(self, g: QGenerator) -> HopfElement:
        def compute() -> HopfElement:
            p = self.prime
            c = g.component(p)
            own = ((c, ((g, 1),)), (c, ()))
            t = self._coproduct_generator(g)
            lead = t.terms.get(own, 0)
            if not lead:
                raise HopfRingError(f"coproduct of {g} lacks the term g (x) [{c}]")
            rest = HopfElement(g.level, p)
            for (left, right), coef in t.terms.items():
                if (left, right) == own:
                    continue
                rest._absorb(self.star(self.antipode(self._term(left, g.level)), self._term(right, g.level)), coef)
            if g.level == 0:
                rest = self.star(rest, self.component(-c))
            return rest.scale(-fp_inverse(lead, p))
        return self._memo('chi', g, compute)

    def antipode(self, a: HopfElement) -> HopfElement:
        """chi: [m] -> [-m], multiplicative for the graded-commutative star product."""
        result = HopfElement(a.level, self.prime)
        for key, coef in a.terms.items():
            offset = self._offset(key, a.level)
            value = self.component(-offset) if a.level == 0 else self.unit(a.level)
            for g, e in key[1]:
                chi = self._antipode_generator(g)
                for _ in range(e):
                    value = self.star(value, chi)
            result._absorb(value, coef)
        return result

    # -- circle product -----------------------------------------------

    def circle(self, a: HopfElement, b: HopfElement) -> HopfElement:
        """
        The composition product a o b, landing at level(a) + level(b).

        The left factor is peeled: components and sigma^{o k} are base
        cases, star products distribute through the coproduct of b, and a
        generator beta^eps Q^s(y) uses
            Q^s(y) o f = sum_i Q^{s+i}(y o P^i_* f)
            beta Q^s(y) o f = sum_i beta Q^{s+i}(y o P^i_* f)
                              - (-1)^{deg y} sum_i Q^{s+i}(y o P^i_* beta f).

        Raises:
            TruncationOverflow: if deg a + deg b exceeds degree_max
        """
        if a.prime != b.prime or a.prime != self.prime:
            raise RankMismatchError("elements over different primes")
        level = a.level + b.level
        if not a or not b:
            return self.zero(level)
        self._guard(a.max_degree() + b.max_degree(), "circle product")
        result = HopfElement(level, self.prime)
        bkey = b.key()
        for key, coef in a.terms.items():
            value = self._memo('circle', (key, a.level, bkey), lambda k=key: self._circle_term(k, a.level, b))
            result._absorb(value, coef)
        return result

    def _circle_term(self, key: TermKey, level: int, b: HopfElement) -> HopfElement:
        p = self.prime
        out_level = level + b.level
        m, mono = key
        if not mono:
            if level >= 1:
                return self.unit(out_level).scale(b.augmentation())
            return self._component_circle(m, b)
        offset = self._offset(key, level)
        if offset:
            x = self.component(offset)
            y = self._mono_element(mono, level)
        else:
            g, e = mono[0]
            if e == 1 and len(mono) == 1:
                return self._generator_circle(g, b)
            x = self._gen_element(g)
            y = self._mono_element(((g, e - 1),) + mono[1:], level)
        deg_y = y.max_degree()
        result = HopfElement(out_level, p)
        for left, right, coef in self.coproduct(b).factors():
            xl = self.circle(x, left)
            if not xl:
                continue
            yr = self.circle(y, right)
            if yr:
                result._absorb(self.star(xl, yr), coef * sign(deg_y * left.max_degree()))
        return result

    def _component_circle(self, m: int, b: HopfElement) -> HopfElement:
        if m == 0:
            return self.unit(b.level).scale(b.augmentation())
        if m == 1:
            return b
        if m < 0:
            return self.antipode(self._component_circle(-m, b))
        # [2h] = [h] * [h] and [2h+1] = [1] * [2h]
        half, odd = divmod(m, 2)
        result = HopfElement(b.level, self.prime)
        for left, right, coef in self.coproduct(b).factors():
            if odd:
                lhs, rhs = left, self.circle(self.component(m - 1), right)
            else:
                lhs, rhs = self.circle(self.component(half), left), self.circle(self.component(half), right)
            if lhs and rhs:
                result._absorb(self.star(lhs, rhs), coef)
        return result

    def _generator_circle(self, g: QGenerator, b: HopfElement) -> HopfElement:
        p = self.prime
        out_level = g.level + b.level
        if not g.word:
            return self._suspend(g.level, b)
        e, s = g.word[0]
        tail = g.tail()
        y = self._gen_element(tail) if tail is not None else self.base(g.level)
        deg_y = y.max_degree()
        top = b.max_degree() // (2 * (p - 1))
        result = HopfElement(out_level, p)
        for i in range(top + 1):
            pb = self.steenrod_act(b, 0, i)
            if pb:
                result._absorb(self.q_act(e, s + i, self.circle(y, pb)))
        if e:
            for i in range(top + 1):
                pbb = self.steenrod_act(b, 1, i)
                if pbb:
                    result._absorb(self.q_act(0, s + i, self.circle(y, pbb)), -sign(deg_y))
        return result

    def _suspend(self, k: int, b: HopfElement) -> HopfElement:
        """
        sigma^{o k} o b: sigma^{o k} o [m] = m sigma^{o k}, star-decomposables
        and the unit die, and Q^J(base) goes to Q^J(sigma^{o (k+l)}).
        """
        out_level = k + b.level
        result = HopfElement(out_level, self.prime)
        for (m, mono), coef in b.terms.items():
            if not mono:
                if b.level == 0:
                    result._absorb(self.sigma(out_level), coef * m)
                continue
            if len(mono) == 1 and mono[0][1] == 1:
                result._absorb(self.evaluate_word(mono[0][0].word, out_level), coef)
        return result

    # -- indecomposables and E-products -------------------------------

    def indecomposables(self, a: HopfElement) -> Dict[Word, int]:
        """Image in the star-indecomposables: single-generator terms by word, components ignored."""
        words: Dict[Word, int] = {}
        for (_, mono), coef in a.terms.items():
            if len(mono) == 1 and mono[0][1] == 1:
                w = mono[0][0].word
                words[w] = (words.get(w, 0) + coef) % self.prime
        return {w: c for w, c in words.items() if c}

    def e_indices(self, I: IndexString) -> List[Pair]:
        """(eps_s, p^{s-1}(i_1 + ... + i_s + b) - Delta_s eps_s) for s = 1..n."""
        p = self.prime
        b = I.b
        partial = 0
        out = []
        for s, (e, i) in enumerate(I.pairs):
            partial += i
            delta = (p ** s - 1) // (p - 1)
            out.append((e, p ** s * (partial + b) - delta * e))
        return out

    def e_product(self, factors: Sequence[Pair], level: int = 0) -> HopfElement:
        """
        sigma^{o level} o E_{f_1} o ... o E_{f_n}.

        Above level 0 the product is taken left to right so that the
        suspension discards decomposables after every factor; at level 0 it
        is taken right to left.
        """
        if any(i < e for e, i in factors):
            return self.zero(level)
        p = self.prime
        self._guard(sum(2 * (p - 1) * i - e for e, i in factors) + level, "E-product")
        if level:
            value = self.sigma(level)
            for e, i in factors:
                value = self.circle(value, self.E(e, i))
                if not value:
                    return self.zero(level)
            return value
        value = self.E(*factors[-1])
        for e, i in reversed(factors[:-1]):
            if not value:
                break
            value = self.circle(self.E(e, i), value)
        return value if value else self.zero(level)

    def predicted_sign(self, I: IndexString) -> int:
        """(-1)^{n i_1 + (n-1) i_2 + ... + i_n + n b}."""
        n = I.length
        twist = sum((n - s) * i for s, i in enumerate(I.indices)) + n * I.b
        return sign(twist)

    def j_indices(self, I: IndexString) -> Word:
        """The leading string J of an E-product, without range checks."""
        p = self.prime
        n = I.length
        eps, idx, b = I.epsilons, I.indices, I.b
        pairs = []
        for s in range(n):
            value = p ** (n - 1 - s) * (sum(idx[:s + 1]) + b)
            value += sum(p ** l * (p ** (n - 1 - s - l) - 1) * idx[s + l + 1] for l in range(n - 1 - s))
            value -= sum(p ** (m - s - 1) * eps[m] for m in range(s + 1, n))
            pairs.append((eps[s], value))
        return tuple(pairs)

    def string_bijection(self, k: int, I: Union[IndexString, DLString],
                         direction: str = 'forward') -> Union[DLString, IndexString]:
        """
        The correspondence between E-product indices and admissible strings.

        forward: I with i_s >= 0 (s >= 2) and 2 i_1 + b + eps_1 > k goes to
        J = (eps_s, j_s) with
            j_s = p^{n-s}(i_1+...+i_s+b) + sum_l p^l (p^{n-s-l}-1) i_{s+l+1} - delta_n(s).
        backward: J admissible with exc(J) + eps_1 > k, inverted through
        p j_{s+1} - j_s = i_{s+1} + eps_{s+1} and j_n = i_1 + ... + i_n + b.
        """
        p = self.prime
        if direction == 'forward':
            if not isinstance(I, IndexString):
                raise StringError("forward direction takes an IndexString")
            if 2 * I.indices[0] + I.b + I.epsilons[0] <= k:
                raise StringError(f"{I} fails 2 i_1 + b + eps_1 > {k}")
            J = DLString(self.j_indices(I))
            if not J.is_admissible(p):
                raise StringError(f"{I} maps to the inadmissible {J}")
            return J
        if direction == 'backward':
            if not isinstance(I, DLString):
                raise StringError("backward direction takes a DLString")
            J = I
            if not J.length or not is_generator_word(J.pairs, k, p):
                raise StringError(f"{J} is not admissible with exc + eps_1 > {k}")
            eps = [e for e, _ in J.pairs]
            js = [j for _, j in J.pairs]
            n = J.length
            tail = [p * js[s + 1] - js[s] - eps[s + 1] for s in range(n - 1)]
            first = js[-1] - sum(eps) - sum(tail)
            return IndexString(tuple(zip(eps, [first] + tail)))
        raise StringError(f"unknown direction {direction!r}")

    def expand_E_product(self, k: int, I: IndexString, strict: bool = False) -> EProductExpansion:
        """
        sigma^{o k} o E_{(eps_1, i_1+b)} o ... o E_{(eps_n, p^{n-1}(i_1+...+i_n+b) - Delta_n eps_n)}.

        Returns the full value, the predicted leading string J with its sign,
        the computed coefficient of Q^J and every other indecomposable term.

        Raises:
            StringError: if I is outside the generator range
            HopfRingError: with strict=True, when the leading term or the
                excess bound on the remaining terms fails
        """
        J = self.string_bijection(k, I, 'forward')
        value = self.e_product(self.e_indices(I), level=k)
        words = self.indecomposables(value)
        expansion = EProductExpansion(
            level=k, index=I, prime=self.prime, value=value, leading=J,
            expected_sign=self.predicted_sign(I),
            leading_coefficient=words.pop(J.pairs, 0),
            residual=words,
        )
        if strict:
            if not expansion.leading_matches:
                raise HopfRingError(f"leading coefficient of {J} in the expansion of {I} is "
                                    f"{expansion.leading_coefficient}, expected {expansion.expected_sign}")
            bad = expansion.residual_violations()
            if bad:
                raise HopfRingError(f"terms {[format_word(w) for w in bad]} reach the excess bound "
                                    f"{expansion.excess_bound}")
        return expansion
