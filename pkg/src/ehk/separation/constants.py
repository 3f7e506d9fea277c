"""The pipeline's constants and the bound expressions built from them.

All logarithms are base 2.  The separator bounds only ever pair ``D`` with
``log n``, and ``D * log n = -C * log n / log(1 - gamma)`` does not depend on
the base, so the choice only matters for the extra log factors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction


def log2(x: float) -> float:
    return math.log2(x) if x > 1 else 0.0


@dataclass(frozen=True)
class PipelineConstants:
    eps: Fraction
    gamma: Fraction
    C: Fraction
    D: float

    @classmethod
    def theoretical(cls) -> "PipelineConstants":
        eps = Fraction(1, 4 * 17 ** 6 * 48 * 192)
        gamma = eps * (1 - 4 * eps) / 2
        C = Fraction(96 ** 2 * 4 * 17 ** 6 + 4)
        # log(1 - gamma) for gamma ~ 1e-12 needs log1p to keep its digits
        D = -float(C) / (math.log1p(-float(gamma)) / math.log(2))
        return cls(eps, gamma, C, D)

    # --- bound expressions, reported beside measured values ---------------
    def hubfree_bound(self, n: int) -> float:
        """kappa bound for the hub-free a-b separator: D log n."""
        return self.D * max(1.0, log2(n))

    def clique_bound(self, n: int, t: int) -> float:
        """D log n + 2D (D log n + 8t)^2 2t log^2 n."""
        L = max(1.0, log2(n))
        return self.D * L + 2 * self.D * (self.D * L + 8 * t) ** 2 * 2 * t * L * L

    def rebalance_bound(self, n: int, d: int) -> float:
        """D (D log n + d) log n."""
        L = max(1.0, log2(n))
        return self.D * (self.D * L + d) * L

    def lift_bound(self, n: int, kappa_y: int, core_hits: int, d: int) -> float:
        return kappa_y + core_hits * (self.hubfree_bound(n) + d) + 1

    def menger_c(self) -> float:
        return 16 * 256 * self.D ** 3

    def menger_f(self, n: int) -> float:
        return self.menger_c() * max(1.0, log2(n)) ** 6

    def banana_bound(self, n: int) -> float:
        return self.menger_c() * max(1.0, log2(n)) ** 8


THEORY = PipelineConstants.theoretical()

# breaker densities used by the proofs
DELTA_HUBFREE = Fraction(1, 2 * 17 ** 3)
DELTA_DANGEROUS = Fraction(1, 6 * 17 ** 2)
DELTA_REBALANCE = Fraction(1, 256)


def local_global_eps(delta) -> Fraction:
    """Largest kill fraction the local-to-global step promises for a (delta, b)-breaker."""
    return Fraction(delta) ** 2 / (48 * 192)
