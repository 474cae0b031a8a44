"""
Independently computed integer families used as oracles by the verification
battery. Nothing here touches words or series; each family comes from its own
recurrence or product formula.
"""

from functools import lru_cache
from itertools import permutations
from math import factorial, prod

from .errors import DomainError


def double_factorial(m: int) -> int:
    """m!! with (-1)!! = 0!! = 1"""
    if m < -1:
        raise DomainError(f"double factorial undefined for {m}")
    return prod(range(m, 0, -2)) if m > 0 else 1


def k_stirling_count(n: int, k: int) -> int:
    """|Q_{n,k}| = prod_{j=1..n} (k(j-1) + 1)"""
    if n < 0 or k < 1:
        raise DomainError(f"no k-Stirling count for n={n}, k={k}")
    return prod(k * (j - 1) + 1 for j in range(1, n + 1))


@lru_cache(maxsize=None)
def stirling_first(n: int, k: int) -> int:
    """Unsigned Stirling numbers of the first kind: c(n,k) = c(n-1,k-1) + (n-1) c(n-1,k)"""
    if n == 0 and k == 0:
        return 1
    if n <= 0 or k <= 0 or k > n:
        return 0
    return stirling_first(n - 1, k - 1) + (n - 1) * stirling_first(n - 1, k)


@lru_cache(maxsize=None)
def stirling_second(n: int, k: int) -> int:
    """S(n,k) = S(n-1,k-1) + k S(n-1,k)"""
    if n == 0 and k == 0:
        return 1
    if n <= 0 or k <= 0 or k > n:
        return 0
    return stirling_second(n - 1, k - 1) + k * stirling_second(n - 1, k)


def ordered_stirling_first(n: int, k: int) -> int:
    return factorial(k) * stirling_first(n, k)


def ordered_stirling_second(n: int, k: int) -> int:
    return factorial(k) * stirling_second(n, k)


def bessel_coeff(n: int, k: int) -> int:
    """
    Coefficient of y^k in the modified Bessel polynomial B_n(y).

    Raises:
        DomainError: unless 1 <= k <= n
    """
    if not 1 <= k <= n:
        raise DomainError(f"bessel coefficient needs 1 <= k <= n, got n={n}, k={k}")
    return factorial(2 * n - k - 1) // (2 ** (n - k) * factorial(n - k) * factorial(k - 1))


@lru_cache(maxsize=None)
def alternating_count(n: int) -> int:
    """
    Permutations of length n with no three consecutive entries monotone.

    Plain enumeration, kept apart from the pattern machinery so it can serve
    as a regression constant for the zigzag level spec.
    """
    if n < 0:
        raise DomainError(f"order must be nonnegative, got {n}")
    total = 0
    for perm in permutations(range(n)):
        if all(
            (perm[i] < perm[i + 1]) != (perm[i + 1] < perm[i + 2]) for i in range(n - 2)
        ):
            total += 1
    return total
