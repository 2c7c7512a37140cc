"""Log-determinant potential and the constants that drive the iteration budgets."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .cone import BlockVec, logdet

ETA = 1.0
KAPPA = ETA / (2.0 * (1.0 + ETA))
THETA = 1.0
GROWTH = 1.0 + ETA / 2.0
LOG_GROWTH = math.log(GROWTH)


class InvalidBounds(ValueError):
    pass


@dataclass(frozen=True)
class Calibration:
    n: int
    eta: float
    kappa: float
    epsilon: float
    theta: float
    growth: float
    log_U_plus: float
    log_U_minus: float

    @property
    def scaling_threshold(self) -> float:
        """Trigger level for |P y|: epsilon / theta^2."""
        return self.epsilon / self.theta**2


def calibrate(n: int, log_U_minus: float) -> Calibration:
    """Constants for total dimension ``n`` and a lower bound log U^- on the potential.

    The upper bound is the potential of the center, log U^+ = -n ln n, and the
    valid-inequality level is epsilon = ln(4/3)/n, which keeps
    (1+epsilon)^{-n} >= 3/4 = 1 - kappa.
    """
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    log_U_plus = -n * math.log(n)
    if not log_U_minus < log_U_plus:
        raise InvalidBounds(f"log U^- = {log_U_minus} must be below log U^+ = {log_U_plus}")
    return Calibration(
        n=n,
        eta=ETA,
        kappa=KAPPA,
        epsilon=math.log(4.0 / 3.0) / n,
        theta=THETA,
        growth=GROWTH,
        log_U_plus=log_U_plus,
        log_U_minus=float(log_U_minus),
    )


def log_potential(x: BlockVec) -> float:
    return logdet(x)


def scaling_budget(cal: Calibration) -> int:
    """Smallest k with (3/2)^k >= U^+/U^-; the loop stops there."""
    return math.ceil((cal.log_U_plus - cal.log_U_minus) / math.log(cal.growth))


def basic_budget(cal: Calibration) -> int:
    """Maximum number of basic steps between two consecutive scalings, ceil(theta^4/eps^2)."""
    return math.ceil(cal.theta**4 / cal.epsilon**2)
