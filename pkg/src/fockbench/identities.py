"""
Exact checks of the combinatorial identity behind the two-source
factorization, and of the factorization itself.

The triple sum

    f(N, K, P) = 2^-N (C(N,K) C(N,P))^(-1/2)
                 * sum_{n,k,p} (-1)^(K+P-k-p) C(N,n) C(n,k) C(N-n,K-k) C(n,p) C(N-n,P-p)

collapses to ``delta(K, P)``, which is why two squeezed vacua pass through a
pair of balanced beam splitters unchanged.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError
from .fock import fidelity, tensor_product
from .protocol import brute_force_joint, joint_cutoff
from .states import check_squeezing, tmsv

MAX_N = 30


def _binom(n: int, k: int) -> int:
    return math.comb(n, k) if 0 <= k <= n else 0


def _check_args(N: int, K: int, P: int) -> None:
    if N > MAX_N:
        raise DomainError(f"N = {N} exceeds the supported maximum {MAX_N}")
    if not (0 <= K <= N and 0 <= P <= N):
        raise DomainError(f"need 0 <= K, P <= N, got N={N}, K={K}, P={P}")


def triple_sum_integer(N: int, K: int, P: int) -> int:
    """The signed integer sum, before the ``2^-N (C(N,K) C(N,P))^(-1/2)`` prefactor."""
    _check_args(N, K, P)
    total = 0
    for n in range(N + 1):
        cn = math.comb(N, n)
        for k in range(K + 1):
            ck = _binom(n, k) * _binom(N - n, K - k)
            if ck == 0:
                continue
            for p in range(P + 1):
                cp = _binom(n, p) * _binom(N - n, P - p)
                if cp:
                    sign = -1 if (K + P - k - p) % 2 else 1
                    total += sign * cn * ck * cp
    return total


def f_triple_sum(N: int, K: int, P: int) -> float:
    s = triple_sum_integer(N, K, P)
    norm2 = math.comb(N, K) * math.comb(N, P)
    root = math.isqrt(norm2)
    denom = root if root * root == norm2 else math.sqrt(norm2)
    return s / (2**N * denom)


@dataclass(frozen=True)
class Violation:
    N: int
    K: int
    P: int
    value: float


def verify_delta(n_max: int, tol: float = 1e-10) -> list[Violation]:
    """All ``(N, K, P)`` with ``N <= n_max`` where ``f`` departs from ``delta(K, P)``.

    Besides the floating-point test, the integer sum must equal exactly
    ``2^N C(N, K)`` on the diagonal and ``0`` off it.
    """
    if n_max > MAX_N:
        raise DomainError(f"n_max = {n_max} exceeds the supported maximum {MAX_N}")
    violations = []
    for N in range(n_max + 1):
        for K in range(N + 1):
            for P in range(N + 1):
                exact = 2**N * math.comb(N, K) if K == P else 0
                value = f_triple_sum(N, K, P)
                if triple_sum_integer(N, K, P) != exact or abs(value - (K == P)) > tol:
                    violations.append(Violation(N, K, P, value))
    return violations


def verify_factorization(lam: float, cutoff: int | None = None, *, check_truncation: bool = True) -> float:
    """Fidelity between the combined pair of squeezed vacua and the uncombined pair."""
    lam = check_squeezing(lam)
    if cutoff is None:
        cutoff = joint_cutoff(lam, 1.0, 0)
    combined = brute_force_joint((0, 0, 0, 0), lam, None, cutoff, check_truncation=check_truncation)
    source = tmsv(lam, cutoff)
    return fidelity(combined, tensor_product(source, source))
