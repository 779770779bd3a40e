"""
Truncated Power Series
======================

Formal power series in a few commuting variables, truncated at a total
degree bound. Coefficients may be ints mod p or any algebra element that
supports +, unary -, int scaling and truthiness (HomClass, HopfElement).
"""

from typing import Any, Callable, Dict, Iterable, Iterator, Optional, Sequence, Tuple
import logging
import operator

from .errors import DivisionError, HopfRingError

logger = logging.getLogger(__name__)

Exps = Tuple[int, ...]


class TruncSeries:
    """Sparse truncated series: exponent tuple -> coefficient."""

    __slots__ = ('variables', 'coeffs', 'bound', 'prime')

    def __init__(self, variables: Sequence[str], coeffs: Optional[Dict[Exps, Any]] = None,
                 bound: int = 0, prime: int = 3):
        self.variables: Tuple[str, ...] = tuple(variables)
        self.bound = bound
        self.prime = prime
        self.coeffs: Dict[Exps, Any] = {}
        for exps, coef in (coeffs or {}).items():
            self._accumulate(tuple(exps), coef)

    # -- construction -------------------------------------------------

    @classmethod
    def zero(cls, variables: Sequence[str], bound: int, prime: int) -> 'TruncSeries':
        return cls(variables, {}, bound, prime)

    @classmethod
    def constant(cls, variables: Sequence[str], coef: Any, bound: int, prime: int) -> 'TruncSeries':
        return cls(variables, {(0,) * len(variables): coef}, bound, prime)

    @classmethod
    def monomial(cls, variables: Sequence[str], exps: Exps, coef: Any, bound: int,
                 prime: int) -> 'TruncSeries':
        return cls(variables, {tuple(exps): coef}, bound, prime)

    @classmethod
    def from_univariate(cls, var: str, coefficients: Dict[int, Any], bound: int,
                        prime: int) -> 'TruncSeries':
        return cls((var,), {(k,): c for k, c in coefficients.items()}, bound, prime)

    @classmethod
    def t_hat(cls, var: str, prime: int, bound: int) -> 'TruncSeries':
        """The series sum_k (-1)^k var^(p^k)."""
        coeffs = {}
        k, power = 0, 1
        while power <= bound:
            coeffs[(power,)] = -1 if k % 2 else 1
            k += 1
            power *= prime
        return cls((var,), coeffs, bound, prime)

    # -- internals ----------------------------------------------------

    def _reduce(self, coef: Any) -> Any:
        if isinstance(coef, int):
            return coef % self.prime
        return coef

    def _accumulate(self, exps: Exps, coef: Any) -> None:
        if sum(exps) > self.bound:
            return
        if any(e < 0 for e in exps):
            if coef:
                raise DivisionError(f"negative exponent {exps} in truncated series")
            return
        if exps in self.coeffs:
            coef = self.coeffs[exps] + coef
        coef = self._reduce(coef)
        if coef:
            self.coeffs[exps] = coef
        else:
            self.coeffs.pop(exps, None)

    def _like(self, coeffs: Optional[Dict[Exps, Any]] = None, bound: Optional[int] = None,
              variables: Optional[Sequence[str]] = None) -> 'TruncSeries':
        return TruncSeries(self.variables if variables is None else variables, coeffs or {},
                           self.bound if bound is None else bound, self.prime)

    def _index(self, var: str) -> int:
        try:
            return self.variables.index(var)
        except ValueError:
            raise HopfRingError(f"variable {var!r} not in {self.variables}") from None

    def _aligned(self, other: 'TruncSeries') -> Tuple['TruncSeries', 'TruncSeries']:
        if self.variables == other.variables:
            return self, other
        merged = tuple(self.variables) + tuple(v for v in other.variables if v not in self.variables)
        return self.extend(merged), other.extend(merged)

    # -- access -------------------------------------------------------

    def coefficient(self, exps: Exps, default: Any = 0) -> Any:
        return self.coeffs.get(tuple(exps), default)

    def items(self) -> Iterator[Tuple[Exps, Any]]:
        return iter(sorted(self.coeffs.items(), key=lambda item: (sum(item[0]), item[0])))

    def degree_range(self) -> Iterable[Exps]:
        """Every exponent tuple within the bound, in graded order."""
        n = len(self.variables)

        def rec(remaining: int, length: int):
            if length == 0:
                yield ()
                return
            for e in range(remaining + 1):
                for rest in rec(remaining - e, length - 1):
                    yield (e,) + rest

        for total in range(self.bound + 1):
            for exps in rec(total, n):
                if sum(exps) == total:
                    yield exps

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    def __len__(self) -> int:
        return len(self.coeffs)

    def __eq__(self, other) -> bool:
        if not isinstance(other, TruncSeries):
            return NotImplemented
        a, b = self._aligned(other)
        bound = min(a.bound, b.bound)
        return a.truncate(bound).coeffs == b.truncate(bound).coeffs

    def __repr__(self) -> str:
        terms = ", ".join(f"{exps}: {coef!r}" for exps, coef in self.items())
        return f"TruncSeries({self.variables}, {{{terms}}}, bound={self.bound})"

    # -- arithmetic ---------------------------------------------------

    def extend(self, variables: Sequence[str]) -> 'TruncSeries':
        """Re-express in a larger ordered variable list."""
        positions = [variables.index(v) for v in self.variables]
        coeffs = {}
        for exps, coef in self.coeffs.items():
            new = [0] * len(variables)
            for pos, e in zip(positions, exps):
                new[pos] = e
            coeffs[tuple(new)] = coef
        return TruncSeries(variables, coeffs, self.bound, self.prime)

    def truncate(self, bound: int) -> 'TruncSeries':
        return self._like({e: c for e, c in self.coeffs.items() if sum(e) <= bound}, bound=bound)

    def __add__(self, other: 'TruncSeries') -> 'TruncSeries':
        a, b = self._aligned(other)
        result = a._like(dict(a.coeffs), bound=min(a.bound, b.bound))
        for exps, coef in b.coeffs.items():
            result._accumulate(exps, coef)
        return result

    def __neg__(self) -> 'TruncSeries':
        return self._like({e: -c for e, c in self.coeffs.items()})

    def __sub__(self, other: 'TruncSeries') -> 'TruncSeries':
        return self + (-other)

    def scale(self, factor: int) -> 'TruncSeries':
        return self._like({e: factor * c for e, c in self.coeffs.items()})

    def map_coefficients(self, fn: Callable[[Any], Any]) -> 'TruncSeries':
        return self._like({e: fn(c) for e, c in self.coeffs.items()})

    def mul(self, other: 'TruncSeries', coef_mul: Callable[[Any, Any], Any] = operator.mul) -> 'TruncSeries':
        """Cauchy product with a caller-supplied coefficient product."""
        a, b = self._aligned(other)
        bound = min(a.bound, b.bound)
        result = a._like({}, bound=bound)
        for e1, c1 in a.coeffs.items():
            d1 = sum(e1)
            for e2, c2 in b.coeffs.items():
                if d1 + sum(e2) > bound:
                    continue
                result._accumulate(tuple(x + y for x, y in zip(e1, e2)), coef_mul(c1, c2))
        return result

    def __mul__(self, other):
        if isinstance(other, TruncSeries):
            return self.mul(other)
        return self.scale(other)

    def __rmul__(self, other):
        return self.scale(other)

    def power(self, k: int, bound: Optional[int] = None) -> 'TruncSeries':
        """k-th power of a scalar series."""
        bound = self.bound if bound is None else bound
        result = TruncSeries.constant(self.variables, 1, bound, self.prime)
        base = self.truncate(bound)
        while k:
            if k & 1:
                result = result.mul(base)
            base = base.mul(base)
            k >>= 1
        return result

    def shift(self, var: str, k: int) -> 'TruncSeries':
        """Multiply by var^k; negative k must not expose a nonzero coefficient below zero."""
        idx = self._index(var)
        coeffs = {}
        for exps, coef in self.coeffs.items():
            new = list(exps)
            new[idx] += k
            if new[idx] < 0:
                raise DivisionError(f"shift by {var}^{k} leaves a negative exponent at {exps}")
            coeffs[tuple(new)] = coef
        return self._like(coeffs, bound=self.bound + k)

    def substitute(self, var: str, series: 'TruncSeries', bound: Optional[int] = None) -> 'TruncSeries':
        """
        Replace var by a scalar series without constant term.

        Args:
            var: Variable of self to eliminate
            series: Int-coefficient series; its variables join the result
            bound: Truncation of the result (defaults to self.bound)

        Returns:
            The composite series in the remaining variables of self followed
            by any new variables of series
        """
        idx = self._index(var)
        if series.coefficient((0,) * len(series.variables)):
            raise HopfRingError("substituted series must have zero constant term")
        bound = self.bound if bound is None else bound
        rest_vars = [v for i, v in enumerate(self.variables) if i != idx]
        variables = tuple(rest_vars) + tuple(v for v in series.variables if v not in rest_vars)
        target = series.extend(variables)
        powers: Dict[int, TruncSeries] = {0: TruncSeries.constant(variables, 1, bound, self.prime)}
        result = TruncSeries(variables, {}, bound, self.prime)
        positions = [variables.index(v) for v in rest_vars]
        for exps, coef in self.items():
            k = exps[idx]
            rest = [0] * len(variables)
            for pos, (i, e) in enumerate((i, e) for i, e in enumerate(exps) if i != idx):
                rest[positions[pos]] = e
            rest_degree = sum(rest)
            if rest_degree > bound:
                continue
            if k not in powers:
                top = max(powers)
                while top < k:
                    powers[top + 1] = powers[top].mul(target.truncate(bound))
                    top += 1
            for e2, n in powers[k].coeffs.items():
                if rest_degree + sum(e2) > bound:
                    continue
                result._accumulate(tuple(a + b for a, b in zip(rest, e2)), n * coef)
        return result
