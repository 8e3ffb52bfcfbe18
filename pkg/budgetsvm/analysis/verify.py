"""Self-checks of the solvers against reference oracles on small instances.

Each suite returns a ``SuiteResult`` listing its checks with measured value,
threshold and verdict. Sizes default to full-size runs; smaller values give
quick checks.
"""

import inspect
import logging
from collections.abc import Callable
from dataclasses import dataclass, field

import numpy as np

from budgetsvm.analysis.diagnostics import (
    KAPPA_FLOOR,
    DiagnosticsError,
    diagnostics_report,
    dual_objective,
    lemma2_predictions,
    progress_J,
    smallest_eigenvalue_Q,
)
from budgetsvm.analysis.oracle import solve_dual_qp
from budgetsvm.config import Algorithm, TrainConfig
from budgetsvm.data.synth import two_blobs
from budgetsvm.models import KernelSpec, SparseVector, kernel_eval, q_matrix
from budgetsvm.training.maintenance import (
    convex_combination,
    golden_section_h,
    merged_beta_closed_form,
)
from budgetsvm.training.solvers import (
    STEP_FUNCTIONS,
    SolverState,
    create_state,
    run_epoch,
    sca_step,
)
from budgetsvm.utils.rng import EVAL_STREAM, stream

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Check:
    """One measured quantity against its threshold."""

    name: str
    measured: float
    threshold: float
    passed: bool


@dataclass
class SuiteResult:
    """Outcome of a verification suite."""

    suite: str
    checks: list[Check] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return bool(self.checks) and all(c.passed for c in self.checks)

    def add(self, name: str, measured: float, threshold: float, passed: bool | None = None) -> None:
        """Record a check; by default it passes when measured <= threshold."""
        if passed is None:
            passed = bool(measured <= threshold)
        self.checks.append(Check(name, float(measured), float(threshold), passed))


def random_instance(rng: np.random.Generator, n: int, d: int = 10):
    """Two-blob instance with random C in [0.5, 32] and gamma in [0.25, 2]."""
    seed = int(rng.integers(0, 2**32))
    ds = two_blobs(n, d, seed)
    C = float(np.exp(rng.uniform(np.log(0.5), np.log(32.0))))
    gamma = float(np.exp(rng.uniform(np.log(0.25), np.log(2.0))))
    return ds, C, KernelSpec.gaussian(gamma)


def exact_state(ds, config: TrainConfig, alpha: np.ndarray) -> SolverState:
    """SCA state whose model represents the given alpha exactly."""
    state = create_state(config, ds)
    state.alpha.alpha[:] = alpha
    for j in np.flatnonzero(alpha).tolist():
        state.model.add_entry(float(ds.labels[j] * alpha[j]), ds.examples[j], True)
    return state


def _random_alpha(rng: np.random.Generator, n: int, C: float) -> np.ndarray:
    alpha = rng.uniform(0.0, C, size=n)
    alpha[rng.random(n) < 0.3] = 0.0
    alpha[rng.random(n) < 0.2] = C
    return alpha


def suite_lemma1(seed: int, n: int = 30, triples: int = 1000, instances: int = 10) -> SuiteResult:
    """D(alpha + delta e_i) - D(alpha) equals J(alpha, i, delta).

    The left side is evaluated two ways: as delta - delta/2 (Q (alpha + alpha'))_i,
    free of cancellation, to an absolute 1e-10; and as the difference of two
    ``dual_objective`` values, relative to max(1, |D(alpha)|).
    """
    rng = stream(seed, EVAL_STREAM)
    result = SuiteResult("lemma1")
    worst = worst_relative = 0.0
    per_instance = max(1, triples // instances)
    for _ in range(instances):
        ds, C, spec = random_instance(rng, n)
        Q = q_matrix(ds, spec)
        for _ in range(per_instance):
            alpha = _random_alpha(rng, ds.n, C)
            i = int(rng.integers(ds.n))
            delta = float(rng.uniform(-alpha[i], C - alpha[i]))
            moved = alpha.copy()
            moved[i] += delta
            J = progress_J(alpha, ds, spec, i, delta)
            change = delta - 0.5 * delta * float(Q[i] @ (alpha + moved))
            worst = max(worst, abs(change - J))
            before = dual_objective(alpha, ds, spec)
            difference = dual_objective(moved, ds, spec) - before
            worst_relative = max(worst_relative, abs(difference - J) / max(1.0, abs(before)))
    result.add("max |dD - J|", worst, 1e-10)
    result.add("max |D(alpha') - D(alpha) - J| / max(1, |D|)", worst_relative, 1e-8)
    return result


def suite_step_optimality(seed: int, n: int = 20, states: int = 1000, instances: int = 10) -> SuiteResult:
    """Re-applying the clipped Newton step at the same coordinate moves nothing."""
    rng = stream(seed, EVAL_STREAM)
    result = SuiteResult("step-optimality")
    worst = 0.0
    per_instance = max(1, states // instances)
    for _ in range(instances):
        ds, C, spec = random_instance(rng, n)
        config = TrainConfig(algo=Algorithm.SCA, C=C, kernel=spec, epochs=1, seed=seed)
        for _ in range(per_instance):
            state = exact_state(ds, config, _random_alpha(rng, ds.n, C))
            i = int(rng.integers(ds.n))
            sca_step(state, ds, i)
            worst = max(worst, abs(sca_step(state, ds, i).delta))
    result.add("max |delta| on repeat", worst, 1e-10)
    return result


def _grid_h(beta_i: float, beta_j: float, gamma_dist: float, points: int) -> tuple[float, float]:
    h = np.linspace(0.0, 1.0, points)
    merged = beta_i * np.exp(-gamma_dist * h * h) + beta_j * np.exp(-gamma_dist * (1.0 - h) ** 2)
    best = int(np.argmax(np.abs(merged)))
    return float(h[best]), float(merged[best])


def suite_merge_oracle(seed: int, pairs: int = 1000, grid: int = 100_001) -> SuiteResult:
    """Golden-section h and closed-form beta' against exhaustive grids."""
    rng = stream(seed, EVAL_STREAM)
    result = SuiteResult("merge-oracle")
    worst_h = worst_beta = 0.0
    min_wd = np.inf
    beta_grid = np.linspace(-4.5, 4.5, grid)
    for _ in range(pairs):
        d = 3
        x_i = SparseVector.from_dense(rng.standard_normal(d))
        x_j = SparseVector.from_dense(rng.standard_normal(d))
        dist = float(np.sum((x_i.to_dense(d) - x_j.to_dense(d)) ** 2))
        # Keep gamma * dist <= 1.5 so |beta'(h)| is unimodal on [0, 1]
        gamma = float(rng.uniform(0.05, 1.5)) / max(dist, 1e-12)
        spec = KernelSpec.gaussian(gamma)
        sign = 1.0 if rng.random() < 0.5 else -1.0
        beta_i, beta_j = sign * rng.uniform(0.05, 2.0, size=2)

        h, merged, wd = golden_section_h(float(beta_i), float(beta_j), x_i, x_j, spec)
        grid_h, _ = _grid_h(float(beta_i), float(beta_j), gamma * dist, grid)
        worst_h = max(worst_h, abs(h - grid_h))
        min_wd = min(min_wd, wd)

        x_prime = convex_combination(x_i, x_j, h)
        k_i = kernel_eval(spec, x_i, x_prime)
        k_j = kernel_eval(spec, x_j, x_prime)
        k_self = kernel_eval(spec, x_prime, x_prime)
        closed = merged_beta_closed_form(float(beta_i), float(beta_j), k_i, k_j, k_self)
        wd_curve = beta_grid**2 * k_self - 2.0 * beta_grid * (beta_i * k_i + beta_j * k_j)
        worst_beta = max(worst_beta, abs(closed - float(beta_grid[np.argmin(wd_curve)])))
    result.add("max |h - grid argmax|", worst_h, 2e-3)
    result.add("max |beta' - grid argmin|", worst_beta, 1e-4)
    result.add("min WD", min_wd, 0.0, passed=bool(min_wd >= 0.0))
    return result


def _run_epochs(state: SolverState, ds, algo: Algorithm, epochs: int, on_epoch: Callable | None = None) -> None:
    step = STEP_FUNCTIONS[algo]
    for epoch in range(epochs):
        run_epoch(state, ds, step)
        counters = state.reset_counters()
        if on_epoch is not None:
            on_epoch(epoch, counters)


def suite_qp_oracle(seed: int, n: int = 30, instances: int = 20, epochs: int = 500) -> SuiteResult:
    """Exact SCA reaches the projected-gradient QP optimum."""
    rng = stream(seed, EVAL_STREAM)
    result = SuiteResult("qp-oracle")
    worst = 0.0
    for k in range(instances):
        ds, C, spec = random_instance(rng, n)
        config = TrainConfig(algo=Algorithm.SCA, C=C, kernel=spec, epochs=epochs, seed=seed + k)
        oracle = solve_dual_qp(q_matrix(ds, spec), C)
        state = create_state(config, ds)
        _run_epochs(state, ds, Algorithm.SCA, epochs)
        gap = abs(oracle.objective - dual_objective(state.alpha, ds, spec))
        logger.debug(f"instance {k}: C={C:.3g} gap={gap:.3e}")
        worst = max(worst, gap)
    result.add("max |D* - D(alpha)|", worst, 1e-6)
    return result


def theorem1_check(
    ds, config: TrainConfig, seeds: list[int]
) -> tuple[np.ndarray, np.ndarray, float]:
    """Mean suboptimality and mean bound at every checkpoint over seeds.

    Returns:
        (mean suboptimality, mean bound, kappa)

    Raises:
        DiagnosticsError: If Q is not strictly positive definite
    """
    Q = q_matrix(ds, config.kernel)
    kappa = smallest_eigenvalue_Q(ds, config.kernel)
    if kappa <= KAPPA_FLOOR:
        raise DiagnosticsError(f"Convergence bound needs kappa > {KAPPA_FLOOR}, got {kappa:.3e}")
    oracle = solve_dual_qp(Q, config.C)
    subopt, bounds = [], []
    for s in seeds:
        report, trace = diagnostics_report(
            ds, config.with_overrides(seed=s), Q, oracle.objective, oracle.alpha, kappa
        )
        subopt.append([oracle.objective - v for v in trace.dual_values])
        bounds.append([report.bound_trace[t] for t in trace.checkpoints])
    return np.mean(subopt, axis=0), np.mean(bounds, axis=0), kappa


def suite_theorem1(
    seed: int, n: int = 50, budget: int = 20, seeds: int = 100, epochs: int = 20
) -> SuiteResult:
    """Mean BSCA suboptimality stays under the averaged convergence bound."""
    result = SuiteResult("theorem1")
    ds = two_blobs(n, 2, seed)
    config = TrainConfig(
        algo=Algorithm.BSCA, C=1.0, kernel=KernelSpec.gaussian(1.0), budget=budget, epochs=epochs
    )
    kappa = smallest_eigenvalue_Q(ds, config.kernel)
    result.add("kappa", kappa, KAPPA_FLOOR, passed=bool(kappa > KAPPA_FLOOR))
    if not result.checks[-1].passed:
        return result
    mean_subopt, mean_bound, _ = theorem1_check(ds, config, [seed + s for s in range(seeds)])
    violations = int(np.sum(mean_subopt > mean_bound + 1e-9))
    result.add("checkpoints violating bound", violations, 0)
    return result


def suite_lemma2(seed: int, n: int = 500, epochs: int = 500, C: float = 1.0, gamma: float = 1.0) -> SuiteResult:
    """Long-run step fractions of exact SGD and SCA match their predictions."""
    result = SuiteResult("lemma2")
    ds = two_blobs(n, 2, seed)
    spec = KernelSpec.gaussian(gamma)
    oracle = solve_dual_qp(q_matrix(ds, spec), C)
    p_sgd, p_sca = lemma2_predictions(oracle.alpha, C)
    tail = max(1, epochs // 2)

    measured: dict[Algorithm, list[float]] = {Algorithm.SGD: [], Algorithm.SCA: []}
    for algo in measured:
        config = TrainConfig(algo=algo, C=C, kernel=spec, epochs=epochs, seed=seed)
        state = create_state(config, ds)

        def collect(epoch, counters, algo=algo):
            if epoch >= epochs - tail:
                value = counters.violations if algo is Algorithm.SGD else counters.nonzero_steps
                measured[algo].append(counters.fraction(value))

        _run_epochs(state, ds, algo, epochs, collect)

    sgd_fraction = float(np.mean(measured[Algorithm.SGD]))
    sca_fraction = float(np.mean(measured[Algorithm.SCA]))
    logger.info(f"p_sgd={p_sgd:.4f} measured={sgd_fraction:.4f}; p_sca={p_sca:.4f} measured={sca_fraction:.4f}")
    result.add("|SGD violations - p_sgd|", abs(sgd_fraction - p_sgd), 0.05)
    result.add("|SCA nonzero steps - p_sca|", abs(sca_fraction - p_sca), 0.05)
    return result


def suite_merge_fraction(
    seed: int, n: int = 500, budget: int | None = None, epochs: int = 100, window: int = 10
) -> SuiteResult:
    """Per-epoch merge fraction of BSCA settles, and below BSGD's at equal budget.

    ``budget`` defaults to n / 10. Stability is the standard deviation of the
    BSCA merge fraction over the last ``window`` epochs.
    """
    result = SuiteResult("merge-fraction")
    ds = two_blobs(n, 2, seed)
    budget = budget if budget is not None else max(2, n // 10)
    window = min(window, epochs)

    fractions: dict[Algorithm, list[float]] = {Algorithm.BSCA: [], Algorithm.BSGD: []}
    for algo in fractions:
        config = TrainConfig(
            algo=algo, C=1.0, kernel=KernelSpec.gaussian(1.0), budget=budget, epochs=epochs, seed=seed
        )
        state = create_state(config, ds)

        def collect(epoch, counters, algo=algo):
            fractions[algo].append(counters.fraction(counters.maintenance_events))

        _run_epochs(state, ds, algo, epochs, collect)

    bsca_tail = np.asarray(fractions[Algorithm.BSCA][-window:])
    bsgd_tail = np.asarray(fractions[Algorithm.BSGD][-window:])
    logger.info(
        f"merge fraction over the last {window} epochs: BSCA {bsca_tail.mean():.4f} "
        f"(std {bsca_tail.std():.4f}), BSGD {bsgd_tail.mean():.4f} (std {bsgd_tail.std():.4f})"
    )
    result.add("BSCA merge fraction std", float(bsca_tail.std()), 0.02)
    result.add(
        "BSCA mean - BSGD mean",
        float(bsca_tail.mean() - bsgd_tail.mean()),
        0.0,
        passed=bool(bsca_tail.mean() < bsgd_tail.mean()),
    )
    return result


def suite_budget_inactive(seed: int, n: int = 40, instances: int = 5, epochs: int = 20) -> SuiteResult:
    """BSCA with B >= n and coalescing reproduces exact SCA bit for bit."""
    rng = stream(seed, EVAL_STREAM)
    result = SuiteResult("budget-inactive")
    mismatches = 0
    for k in range(instances):
        ds, C, spec = random_instance(rng, n)
        base = TrainConfig(C=C, kernel=spec, budget=max(2, ds.n), epochs=epochs, seed=seed + k)
        budgeted = create_state(base.with_overrides(algo=Algorithm.BSCA), ds)
        exact = create_state(base.with_overrides(algo=Algorithm.SCA), ds)
        _run_epochs(budgeted, ds, Algorithm.BSCA, epochs)
        _run_epochs(exact, ds, Algorithm.SCA, epochs)
        same = np.array_equal(budgeted.alpha.alpha, exact.alpha.alpha) and np.array_equal(
            budgeted.model.betas(), exact.model.betas()
        )
        mismatches += not same
    result.add("instances differing", mismatches, 0)
    return result


SUITES: dict[str, Callable[..., SuiteResult]] = {
    "lemma1": suite_lemma1,
    "lemma2": suite_lemma2,
    "theorem1": suite_theorem1,
    "merge-oracle": suite_merge_oracle,
    "merge-fraction": suite_merge_fraction,
    "qp-oracle": suite_qp_oracle,
    "step-optimality": suite_step_optimality,
    "budget-inactive": suite_budget_inactive,
}


def run_suite(name: str, seed: int, n: int | None = None) -> SuiteResult:
    """Run a suite by name; ``n`` overrides the instance size where it applies."""
    try:
        suite = SUITES[name]
    except KeyError:
        raise ValueError(f"Unknown suite '{name}' (expected one of: {', '.join(SUITES)})")
    kwargs = {}
    if n is not None and "n" in inspect.signature(suite).parameters:
        kwargs["n"] = n
    logger.info(f"Running verify suite {name} (seed={seed})")
    return suite(seed, **kwargs)
