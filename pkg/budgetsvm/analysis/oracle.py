"""Reference solver for the box-constrained dual QP.

Spectral projected gradient: the step length comes from the
Barzilai-Borwein quotient of the previous move, the projected direction is
followed with an exact line search (the objective is quadratic), and the
run stops once the projected-gradient residual is below tolerance.
"""

import logging
from dataclasses import dataclass

import numpy as np

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class QPSolution:
    """Oracle optimum of max_{0 <= alpha <= C} 1^T alpha - 1/2 alpha^T Q alpha."""

    alpha: np.ndarray
    objective: float
    residual: float
    iterations: int
    converged: bool


def dual_value(Q: np.ndarray, alpha: np.ndarray) -> float:
    return float(alpha.sum() - 0.5 * alpha @ Q @ alpha)


def projected_residual(Q: np.ndarray, alpha: np.ndarray, C: float) -> float:
    """||[alpha + grad D]_0^C - alpha||_inf; zero exactly at the optimum."""
    grad = 1.0 - Q @ alpha
    return float(np.max(np.abs(np.clip(alpha + grad, 0.0, C) - alpha)))


def solve_dual_qp(
    Q: np.ndarray,
    C: float,
    tol: float = 1e-10,
    max_iter: int = 200_000,
) -> QPSolution:
    """Maximize the SVM dual over the box [0, C]^n."""
    Q = np.asarray(Q, dtype=np.float64)
    n = Q.shape[0]
    alpha = np.zeros(n)
    grad = np.ones(n)
    eig_max = float(np.linalg.eigvalsh(Q)[-1]) if n else 0.0
    step = 1.0 / max(eig_max, 1e-12)

    residual = projected_residual(Q, alpha, C)
    iterations = 0
    while residual > tol and iterations < max_iter:
        direction = np.clip(alpha + step * grad, 0.0, C) - alpha
        q_dir = Q @ direction
        curvature = float(direction @ q_dir)
        slope = float(grad @ direction)
        if curvature <= 0.0:
            length = 1.0
        else:
            length = min(1.0, slope / curvature)
        if length <= 0.0:
            # Direction has no ascent left; fall back to the safe step
            step = 1.0 / max(eig_max, 1e-12)
            iterations += 1
            residual = projected_residual(Q, alpha, C)
            continue
        alpha = np.clip(alpha + length * direction, 0.0, C)
        grad = 1.0 - Q @ alpha
        step = float(direction @ direction) / curvature if curvature > 0.0 else 1e10
        step = min(max(step, 1e-10), 1e10)
        residual = float(np.max(np.abs(np.clip(alpha + grad, 0.0, C) - alpha)))
        iterations += 1

    converged = residual <= tol
    if not converged:
        logger.warning(
            f"QP oracle stopped after {iterations} iterations, residual={residual:.3e}"
        )
    else:
        logger.debug(f"QP oracle converged in {iterations} iterations")
    return QPSolution(alpha, dual_value(Q, alpha), residual, iterations, converged)
