"""
Verification Suites
===================

The named suites run by `hopfring verify`. A suite is a list of SuiteTask
records; each task returns CheckResult records and declares the smallest
degree budget it needs. Tasks whose min_degree exceeds the configured
degree_max are reported as skipped, so a small budget runs a subset.

Invariant-side suites (Dickson and Mui invariants, bases, duality, Adem
confluence) live here; the Hopf ring verifiers live in checks.py.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from itertools import combinations
from typing import Callable, Dict, List, Optional, Sequence
import logging
import random
import time

from .biv_algebra import CohomClass, pair
from .checks import (
    compare_cases,
    verify_action_formulas,
    verify_change_of_basis,
    verify_e_expansion,
    verify_e_relations,
    verify_excess_relation,
    verify_hopf_axioms,
    verify_nishida_migrate,
    verify_sigma_vanishing_range,
    verify_steenrod_duality,
    verify_steenrod_series,
    verify_string_bijection,
    verify_transfer,
    verify_worked_example,
)
from .config import RunConfig
from .dyer_lashof import (
    DLElement,
    Word,
    adem_reduce,
    basis_R,
    format_word,
    phi_relations,
    reduce_product,
    word_degree,
)
from .errors import StringError, TruncationOverflow
from .hopf_ring import HopfRing
from .invariants import (
    B_generators,
    basis_B,
    basis_coinv_dual,
    basis_cokernel,
    basis_invariants,
    check_division_agrees,
    expected_leading_term,
    integer_bracket_mismatches,
    invariant_monomial,
    leading_term,
    mono_pairs,
    mui_product_relation,
    mui_R,
    steenrod_closure_failures,
    string_key,
    v_product,
    v_product_by_division,
    verify_gl_invariance,
)
from .linalg import as_matrix, is_unit_triangular
from .report import CheckResult, CheckStatus, PeakMemory, Report, timed

logger = logging.getLogger(__name__)

# Degree of sigma^{o 6} o (E_(1,7) o E_(1,29) + ...) at p = 3
WORKED_EXAMPLE_DEGREE = 148


@dataclass
class SuiteTask:
    """One schedulable unit of a suite."""
    name: str
    run: Callable[[], List[CheckResult]]
    min_degree: int = 0

    def execute(self, degree_max: int) -> List[CheckResult]:
        if degree_max < self.min_degree:
            return [CheckResult.skipped(self.name, f"needs degree_max >= {self.min_degree}")]
        logger.info(f"Running {self.name}")
        try:
            results, elapsed = timed(self.run)
        except TruncationOverflow as e:
            logger.warning(f"{self.name} overflowed: {e}")
            return [CheckResult(self.name, CheckStatus.OVERFLOW, notes=[str(e)])]
        for result in results:
            result.elapsed = elapsed
        logger.info(f"Finished {self.name} in {elapsed:.2f}s")
        return results


# -- Dickson and Mui invariants ---------------------------------------------

def dickson_mui_checks(n: int, prime: int, degree: int = 30) -> List[CheckResult]:
    """
    Division formula, V_n = L_n / L_{n-1}, R^2 = 0, the product relation,
    GL_n invariance and the phi relations at rank n. For n <= 2 also the
    integer-determinant brackets and Steenrod closure of B[n] up to degree.
    """
    zero = CohomClass.zero(n, prime)
    results = [CheckResult.from_bool(f'dickson-mui:division-n{n}', check_division_agrees(n, prime),
                                     {'rank': n})]
    results.append(compare_cases(f'dickson-mui:R-squared-n{n}', (
        ({'s': s}, mui_R(n, (s,), prime) ** 2, zero) for s in range(n))))
    results.append(compare_cases(f'dickson-mui:product-relation-n{n}', (
        ({'indices': list(idx)}, *mui_product_relation(n, idx, prime))
        for k in range(2, n + 1) for idx in combinations(range(n), k))))

    moved = [label for label, c in B_generators(n, prime) if not verify_gl_invariance(n, c)]
    results.append(CheckResult.from_bool(f'dickson-mui:gl-invariance-n{n}', not moved, {'moved': moved}))
    results.append(compare_cases(f'dickson-mui:phi-relations-n{n}', (
        ({'relation': label}, lhs, rhs) for label, lhs, rhs in phi_relations(n, prime))))
    results.append(compare_cases(f'dickson-mui:v-product-n{n}', [
        ({'rank': n}, v_product(n, prime), v_product_by_division(n, prime))]))
    if n <= 2:
        mismatched = integer_bracket_mismatches(n, prime)
        results.append(CheckResult.from_bool(f'dickson-mui:integer-brackets-n{n}', not mismatched,
                                             {'brackets': mismatched}))
        escaped = steenrod_closure_failures(n, degree, prime)
        results.append(CheckResult.from_bool(f'dickson-mui:steenrod-closure-n{n}', not escaped,
                                             {'images': escaped[:5]}))
    return results


def verify_leading_terms(kind: str, rank_max: int, degree: int, prime: int) -> CheckResult:
    """
    Leading monomial of q^I against the predicted one, for Dickson strings
    (b = 0) or Mui strings (b > 0). Coefficients equal up to sign pass; the
    sign flips are counted in a note.
    """
    name = f'{kind}-leading-terms'
    checked = flipped = 0
    for n in range(1, rank_max + 1):
        for d in range(1, degree + 1):
            for I in basis_invariants(n, d, prime):
                if (I.b == 0) != (kind == 'dickson'):
                    continue
                checked += 1
                mono, coef = leading_term(invariant_monomial(I, prime))
                expected, sgn = expected_leading_term(I, prime)
                same, opposite = (coef - sgn) % prime == 0, (coef + sgn) % prime == 0
                if mono != expected or not (same or opposite):
                    return CheckResult.failed(name, {
                        'index': str(I), 'leading': str(mono), 'coefficient': coef,
                        'expected': str(expected), 'expected_sign': sgn,
                    })
                if not same:
                    flipped += 1
    notes = [f"{flipped} of {checked} leading coefficients carry the opposite sign"] if flipped else []
    return CheckResult.passed(name, notes)


def verify_coinvariant_duality(rank_max: int, degree: int, prime: int) -> CheckResult:
    """
    Pairing q^I against the dual monomials Q(J): ordered by the string order of
    the predicted leading monomials the matrix is lower triangular with invertible diagonal.
    """
    name = 'coinvariant-duality'
    off_diagonal = 0
    for n in range(1, rank_max + 1):
        for d in range(1, degree + 1):
            strings = basis_invariants(n, d, prime)
            if not strings:
                continue
            duals = basis_coinv_dual(n, None, d, prime)
            order = sorted(range(len(strings)), key=lambda j: string_key(
                mono_pairs(expected_leading_term(strings[j], prime)[0]), prime))
            classes = {i: invariant_monomial(strings[i], prime) for i in order}
            rows = [[int(pair(classes[i], duals[j])) for i in order] for j in order]
            if not is_unit_triangular(as_matrix(rows, prime), prime):
                return CheckResult.failed(name, {
                    'rank': n, 'degree': d, 'strings': [str(strings[i]) for i in order], 'matrix': rows,
                })
            off_diagonal += sum(1 for r, row in enumerate(rows) for c, v in enumerate(row) if v and r != c)
    notes = [f"{off_diagonal} nonzero entries below the diagonal"] if off_diagonal else []
    return CheckResult.passed(name, notes)


def verify_length_duality(rank_max: int, k_max: int, degree: int, prime: int) -> List[CheckResult]:
    """dim B_k[n]_d = dim R_k[n]_d, and invariants = B_0[n] + cokernel per degree."""
    dual_name, split_name = 'length-duality:B-vs-R', 'length-duality:invariant-split'
    results = []
    for n in range(1, rank_max + 1):
        for k in range(k_max + 1):
            for d in range(degree + 1):
                b, r = len(basis_B(n, k, d, prime)), len(basis_R(n, k, d, prime))
                if b != r:
                    return [CheckResult.failed(dual_name, {'rank': n, 'k': k, 'degree': d, 'B': b, 'R': r})]
    results.append(CheckResult.passed(dual_name))
    for n in range(1, rank_max + 1):
        for d in range(degree + 1):
            total = len(basis_invariants(n, d, prime))
            parts = len(basis_B(n, 0, d, prime)) + len(basis_cokernel(n, d, prime))
            if total != parts:
                results.append(CheckResult.failed(split_name, {
                    'rank': n, 'degree': d, 'invariants': total, 'B0_plus_cokernel': parts}))
                return results
    results.append(CheckResult.passed(split_name))
    return results


# -- Adem confluence ----------------------------------------------------------

def random_words(count: int, length: int, degree_max: int, prime: int, seed: int) -> List[Word]:
    """Seeded words (eps, i) with i >= eps and 0 < degree <= degree_max."""
    rng = random.Random(seed)
    top = degree_max // (2 * (prime - 1)) + 1
    words = []
    while len(words) < count:
        word = []
        for _ in range(length):
            e = rng.randint(0, 1)
            word.append((e, rng.randint(e, top)))
        word = tuple(word)
        if 0 < word_degree(word, prime) <= degree_max:
            words.append(word)
    return words


def verify_adem_confluence(words: Sequence[Word], prime: int) -> List[CheckResult]:
    """Leftmost and rightmost rewriting agree, and products reassociate."""
    schedules, assoc = 'adem-confluence:schedules', 'adem-confluence:associativity'
    for word in words:
        left, right = adem_reduce(word, prime, 'leftmost'), adem_reduce(word, prime, 'rightmost')
        if left != right:
            return [CheckResult.failed(schedules, {'word': format_word(word),
                                                   'leftmost': str(left), 'rightmost': str(right)})]
    results = [CheckResult.passed(schedules, [f"{len(words)} words"])]
    for word in words:
        if len(word) < 3:
            continue
        a, b, c = (DLElement({(letter,): 1}, prime) for letter in word[:3])
        grouped_left = reduce_product(reduce_product(a, b), c)
        grouped_right = reduce_product(a, reduce_product(b, c))
        if grouped_left != grouped_right:
            results.append(CheckResult.failed(assoc, {'word': format_word(word[:3]),
                                                      '(ab)c': str(grouped_left), 'a(bc)': str(grouped_right)}))
            return results
    results.append(CheckResult.passed(assoc))
    return results


# -- registry -----------------------------------------------------------------

def _invariant_tasks(name: str, config: RunConfig, ring: HopfRing) -> List[SuiteTask]:
    p, n_max, d = config.prime, config.rank_max, config.degree_max
    if name == 'dickson-mui':
        return [SuiteTask(f'dickson-mui:n{n}', lambda n=n: dickson_mui_checks(n, p, d))
                for n in range(1, min(n_max, 3) + 1)]
    if name in ('dickson-leading-terms', 'mui-leading-terms'):
        kind = name.split('-')[0]
        return [SuiteTask(name, lambda: [verify_leading_terms(kind, n_max, d, p)])]
    if name == 'coinvariant-duality':
        return [SuiteTask(name, lambda: [verify_coinvariant_duality(n_max, d, p)])]
    if name == 'length-duality':
        k_max = config.budget(name, 'k_max', 4)
        return [SuiteTask(name, lambda: verify_length_duality(n_max, k_max, d, p))]
    if name == 'adem-confluence':
        samples = config.budget(name, 'samples', 500)
        length = config.budget(name, 'length', 3)
        degree = config.budget(name, 'degree', 60)
        return [SuiteTask(name, lambda: verify_adem_confluence(
            random_words(samples, length, degree, p, config.seed), p))]
    raise StringError(f"not an invariant suite: {name}")


def _hopf_ring_tasks(name: str, config: RunConfig, ring: HopfRing) -> List[SuiteTask]:
    n_max, d = config.rank_max, config.degree_max

    def capped(key: str, default: int) -> int:
        return min(config.budget(name, key, default), d)

    if name == 'e-relations':
        trunc = config.budget(name, 'trunc', 12)
        levels = config.budget(name, 'levels', 2)
        return [
            SuiteTask(name, lambda: verify_e_relations(ring, trunc), min_degree=trunc),
            SuiteTask(f'{name}:excess', lambda: [verify_excess_relation(ring, levels, capped('degree', 24))]),
        ]
    if name == 'e-expansion':
        tasks = [SuiteTask(f'{name}:k{k}', lambda k=k: [verify_e_expansion(ring, k, d, n_max)])
                 for k in config.budget(name, 'levels', [0, 1, 2])]

        def worked_example() -> List[CheckResult]:
            return [verify_worked_example(HopfRing(3, max(WORKED_EXAMPLE_DEGREE + 12, config.engine_degree_max)))]

        return tasks + [SuiteTask(f'{name}:worked-example', worked_example, min_degree=WORKED_EXAMPLE_DEGREE)]
    if name == 'string-bijection':
        return [SuiteTask(f'{name}:k{k}', lambda k=k: [verify_string_bijection(ring, k, d, n_max)])
                for k in config.budget(name, 'levels', [0, 1, 2])]
    if name == 'sigma-vanishing':
        levels = config.budget(name, 'levels', 4)
        return [SuiteTask(name, lambda: [verify_sigma_vanishing_range(ring, levels, capped('degree', 24), n_max)])]
    if name == 'change-of-basis':
        return [SuiteTask(f'{name}:k{k}', lambda k=k: verify_change_of_basis(ring, k, capped('degree', 24), n_max))
                for k in config.budget(name, 'levels', [0, 1, 2])]
    if name == 'action-formulas':
        trunc = config.budget(name, 'trunc', 10)
        return [SuiteTask(name, lambda: verify_action_formulas(ring, trunc), min_degree=trunc)]
    if name == 'steenrod-series':
        trunc = config.budget(name, 'trunc', 10)
        return [SuiteTask(f'{name}:n{n}', lambda n=n: verify_steenrod_series(ring, n, trunc), min_degree=trunc)
                for n in config.budget(name, 'ranks', [1, 2])]
    if name == 'nishida-transfer':
        tasks = []
        for n in config.budget(name, 'ranks', [1, 2]):
            tasks.append(SuiteTask(f'{name}:n{n}', lambda n=n: [
                verify_transfer(ring, n, capped('degree', 24)),
                verify_steenrod_duality(n, capped('degree', 24), ring.prime),
                verify_nishida_migrate(ring, n, capped('degree', 24)),
            ]))
        return tasks
    if name == 'hopf-axioms':
        return [SuiteTask(name, lambda: verify_hopf_axioms(ring), min_degree=config.budget(name, 'degree', 16))]
    raise StringError(f"not a Hopf ring suite: {name}")


INVARIANT_SUITES = (
    'dickson-mui', 'dickson-leading-terms', 'mui-leading-terms',
    'coinvariant-duality', 'length-duality', 'adem-confluence',
)
HOPF_RING_SUITES = (
    'e-relations', 'e-expansion', 'string-bijection', 'sigma-vanishing', 'change-of-basis',
    'action-formulas', 'steenrod-series', 'nishida-transfer', 'hopf-axioms',
)
SUITES = INVARIANT_SUITES + HOPF_RING_SUITES + ('all',)

# Short names accepted by --suite
SUITE_ALIASES: Dict[str, str] = {
    'lemma31': 'dickson-leading-terms',
    'lemma32': 'mui-leading-terms',
    'thm36': 'coinvariant-duality',
    'prop45': 'length-duality',
    'lemma45': 'e-expansion',
    'lemma46': 'string-bijection',
    'prop47': 'e-relations',
    'cor49': 'sigma-vanishing',
    'thm43': 'change-of-basis',
    'thm52': 'action-formulas',
    'lemma51': 'steenrod-series',
    'confluence': 'adem-confluence',
}


def resolve_suite(name: str) -> str:
    return SUITE_ALIASES.get(name, name)


def build_suite(name: str, config: RunConfig, ring: HopfRing) -> List[SuiteTask]:
    """Tasks of a named suite; 'all' concatenates every suite."""
    name = resolve_suite(name)
    if name == 'all':
        return [task for suite in SUITES[:-1] for task in build_suite(suite, config, ring)]
    if name in INVARIANT_SUITES:
        return _invariant_tasks(name, config, ring)
    if name in HOPF_RING_SUITES:
        return _hopf_ring_tasks(name, config, ring)
    raise StringError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")


def run_suite(config: RunConfig, ring: Optional[HopfRing] = None) -> Report:
    """
    Run config.suite on a thread pool of config.jobs workers.

    Results keep the task order regardless of completion order. Errors
    other than TruncationOverflow propagate to the caller.
    """
    ring = ring or HopfRing(config.prime, config.engine_degree_max)
    config.suite = resolve_suite(config.suite)
    tasks = build_suite(config.suite, config, ring)
    report = Report(config.suite, config.to_dict())
    memory = PeakMemory()
    start = time.monotonic()
    logger.info(f"Suite {config.suite}: {len(tasks)} tasks on {config.jobs} worker(s)")

    with ThreadPoolExecutor(max_workers=config.jobs) as pool:
        futures = [pool.submit(task.execute, config.degree_max) for task in tasks]
        for future in futures:
            report.extend(future.result())
            memory.sample()

    report.elapsed = time.monotonic() - start
    report.peak_memory_mb = memory.peak_mb
    counts: Dict[str, int] = report.counts()
    logger.info(f"Suite {config.suite} done: {counts}")
    return report
