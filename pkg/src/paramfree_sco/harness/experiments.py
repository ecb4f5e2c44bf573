"""
Experiment runners behind the CLI subcommands
"""

import math
from typing import Any, Dict, List, Optional, Tuple, Type

import numpy as np

from ..adaptive.pipeline import lambda_grid_adaptive, multi_geometry, optimal_adaptive
from ..concentration.monte_carlo import COVERAGE_CHECKS, DEFAULT_TRIALS, CoverageResult
from ..concentration.widths import SubGammaTail, dependent_sum_bound, union_bound_sum
from ..errors import ConfigError
from ..optimizers.adaptive_methods import GEOMETRY_BATCHES, ada_sgd_batch, sgd_strongly_convex_batch
from ..problems.base import ProblemSpec, sample_batch
from ..problems.families import AbsLinearAdversarial, StronglyConvex1D, build_family
from ..selection.loss_matrix import LossMatrix
from ..selection.selectors import SelectionOutcome, reliable_select, standard_select
from ..selection.widths import PRACTICAL_RULE, THEORY_RULE, widths_from_column, widths_practical, widths_theory
from ..utils.norms import NormName, norm
from .base_runner import BaseRunner, TrialTask
from .config_loader import ExperimentConfig
from .reporting import ExperimentReport, fit_loglog_slope, quantile

# Output norm allowed relative to D* for the two-stage method
NORM_FACTOR = 33.0
# Calibrated constant of the known-radius envelope c·L·R·√ln(2/δ)/√n
ENVELOPE_CONSTANT = 10.0
COMPARISON_DIMENSIONS = (10, 100, 1000, 10_000)


def _chunked(trials: int, chunk: int, start_index: int = 0, **data: Any) -> List[TrialTask]:
    tasks = []
    for offset, start in enumerate(range(0, trials, chunk)):
        tasks.append(TrialTask(start_index + offset, {"start": start, "stop": min(trials, start + chunk), **data}))
    return tasks


def _binomial_floor(delta: float, trials: int) -> float:
    return 1.0 - delta - 3.0 * math.sqrt(delta * (1.0 - delta) / trials)


class FamilyRunner(BaseRunner):
    """Runner over a configured problem family"""

    default_family = AbsLinearAdversarial.name
    default_family_params: Dict[str, str] = {}
    needs_oracle = True

    def __init__(self, config: ExperimentConfig, runner_id: Optional[str] = None):
        super().__init__(config, runner_id)
        self.family = config.family or self.default_family
        first_spec = self.build_spec(config.grid()[0])
        if self.needs_oracle and first_spec.oracle is None:
            raise ConfigError(f"{self.experiment} needs a family with a population oracle; {self.family} has none")

    def build_spec(self, n: Optional[int] = None) -> ProblemSpec:
        """Family instance; the adversarial family is tied to the sample size unless n is given"""
        params = dict(self.default_family_params) if self.config.family is None else {}
        params.update(self.config.family_params)
        if n is not None and self.family == AbsLinearAdversarial.name and "n" not in params:
            params["n"] = n
        return build_family(self.family, **params)

    def suboptimality(self, spec: ProblemSpec, points: np.ndarray) -> np.ndarray:
        return np.atleast_1d(spec.oracle.suboptimality(np.atleast_2d(points)))  # type: ignore[union-attr]

    def _report(self, rows: List[Dict[str, Any]], summary: Dict[str, Any]) -> ExperimentReport:
        return ExperimentReport(self.experiment, self.config.resolved_items(), rows, summary)


def _select_pair(
    losses: LossMatrix,
    lipschitz_hat: float,
    norms: np.ndarray,
    delta: float,
    gamma: float,
    width_rule: str = THEORY_RULE,
) -> Tuple[SelectionOutcome, SelectionOutcome]:
    """Greedy choice among trained candidates and reliable choice against the reference"""
    greedy = standard_select(losses, include_reference=False)
    if width_rule == PRACTICAL_RULE:
        widths = widths_practical(losses, lipschitz_hat * norms)
    else:
        widths = widths_theory(losses, lipschitz_hat, norms, delta)
    return greedy, reliable_select(losses, widths, gamma)


class LowerBoundRunner(FamilyRunner):
    """Greedy versus reliable selection over step sizes on the adversarial instance"""

    experiment = "lowerbound"
    MIN_N = 3000

    def __init__(self, config: ExperimentConfig, runner_id: Optional[str] = None):
        if (config.family or self.default_family) != AbsLinearAdversarial.name:
            raise ConfigError("lowerbound runs on abs_linear_adversarial only")
        if config.n < self.MIN_N:
            raise ConfigError(f"lowerbound needs n >= {self.MIN_N}, got {config.n}")
        super().__init__(config, runner_id)
        self.spec = self.build_spec(config.n)
        self.rates = np.exp(np.asarray(config.rate_exponents, dtype=float))
        self.threshold = float(self.rates.max()) / (288.0 * math.sqrt(config.n))

    def trial_tasks(self) -> List[TrialTask]:
        return _chunked(self.config.trials, self.config.chunk)

    def run_trial(self, task: TrialTask) -> List[Dict[str, Any]]:
        n, spec, rates = self.config.n, self.spec, self.rates
        trials = range(task.data["start"], task.data["stop"])
        batches = [sample_batch(spec, 2 * n, self.config.seed, trial) for trial in trials]
        training = np.stack([batch.values[:n] for batch in batches])
        averages = ada_sgd_batch(spec, np.tile(rates, len(batches)), np.repeat(training, rates.size, axis=0))
        averages = averages.reshape(len(batches), rates.size, spec.dimension)

        rows = []
        for trial, batch, candidates in zip(trials, batches, averages):
            validation = batch[n:]
            points = np.vstack([np.zeros((1, spec.dimension)), candidates])
            losses = LossMatrix.from_problem(spec, points, validation)
            greedy, reliable = _select_pair(losses, 1.0, norm(points, "l2", axis=1), self.config.delta, self.config.gamma)
            subopt = self.suboptimality(spec, points)
            rows.append({
                "trial": trial,
                "greedy_k": greedy.chosen,
                "greedy_x": float(points[greedy.chosen, 0]),
                "greedy_subopt": float(subopt[greedy.chosen]),
                "greedy_indicator": int(subopt[greedy.chosen] >= self.threshold),
                "reliable_k": reliable.chosen,
                "reliable_x": float(points[reliable.chosen, 0]),
                "reliable_subopt": float(subopt[reliable.chosen]),
            })
        return rows

    def summarize(self, results: List[List[Dict[str, Any]]]) -> ExperimentReport:
        rows = [row for chunk in results for row in chunk]
        greedy_mean = float(np.mean([r["greedy_subopt"] for r in rows]))
        reliable_mean = float(np.mean([r["reliable_subopt"] for r in rows]))
        indicator_rate = float(np.mean([r["greedy_indicator"] for r in rows]))
        self.logger.info(f"greedy indicator rate {indicator_rate:.4f}, mean subopt greedy {greedy_mean:.4g} reliable {reliable_mean:.4g}")
        return self._report(rows, {
            "n": self.config.n,
            "trials": len(rows),
            "q": self.spec.q,
            "eta_max": float(self.rates.max()),
            "threshold": self.threshold,
            "greedy_indicator_rate": indicator_rate,
            "greedy_mean_subopt": greedy_mean,
            "reliable_mean_subopt": reliable_mean,
            "reliable_not_worse": int(reliable_mean <= greedy_mean),
        })


class ScalingRunner(FamilyRunner):
    """Suboptimality of one method across a grid of sample sizes"""

    experiment = "scaling"
    default_family_params = {"shift": "1"}

    def __init__(self, config: ExperimentConfig, runner_id: Optional[str] = None):
        super().__init__(config, runner_id)
        self.p: NormName = "l2" if config.geometry == "all" else config.geometry  # type: ignore[assignment]
        if config.method == "known_radius" and config.radius is None:
            if self.build_spec(config.grid()[0]).oracle.d_star(self.p) == 0.0:  # type: ignore[union-attr]
                raise ConfigError("known_radius needs radius > 0; the family's optimum is the origin")

    def trial_tasks(self) -> List[TrialTask]:
        tasks: List[TrialTask] = []
        for n in self.config.grid():
            if self.config.method == "known_radius":
                tasks.extend(_chunked(self.config.trials, self.config.chunk, len(tasks), n=n))
            else:
                tasks.extend(TrialTask(len(tasks) + t, {"start": t, "stop": t + 1, "n": n}) for t in range(self.config.trials))
        return tasks

    def _radius(self, spec: ProblemSpec) -> float:
        if self.config.radius is not None:
            return float(self.config.radius)
        return spec.oracle.d_star(self.p)  # type: ignore[union-attr]

    def run_trial(self, task: TrialTask) -> List[Dict[str, Any]]:
        n = task.data["n"]
        spec = self.build_spec(n)
        d_star = spec.oracle.d_star(self.p)  # type: ignore[union-attr]
        trials = range(task.data["start"], task.data["stop"])
        method = self.config.method
        if method == "known_radius":
            radius = self._radius(spec)
            values = np.stack([sample_batch(spec, n, self.config.seed, n, t).values for t in trials])
            averages = GEOMETRY_BATCHES[self.p](spec, radius, values)
            subopt = self.suboptimality(spec, averages)
            return [
                {"n": n, "trial": t, "subopt": float(s), "output_norm": float(norm(x, self.p)), "radius": radius}
                for t, x, s in zip(trials, averages, subopt)
            ]

        rows = []
        for t in trials:
            row: Dict[str, Any] = {"n": n, "trial": t}
            if method == "adaptive":
                result = optimal_adaptive(
                    spec, sample_batch(spec, 2 * n, self.config.seed, n, t), self.p, self.config.delta,
                    self.config.lambda_strategy, erm_max_iter=self.config.erm_max_iter,
                    lipschitz_inflation=self.config.lipschitz_inflation, strict_erm=self.config.strict_erm,
                )
                output = result.output
                row.update(lam=result.geometry.lam, radius=result.stage1_radius, erm_converged=int(result.erm.converged))
            elif method == "lambda_grid":
                selected = lambda_grid_adaptive(
                    spec, sample_batch(spec, 3 * n, self.config.seed, n, t), self.p, self.config.delta,
                    self.config.gamma, erm_max_iter=self.config.erm_max_iter, strict_erm=self.config.strict_erm,
                )
                output = selected.output
                chosen = selected.outcome.chosen
                row.update(chosen=chosen, lam=selected.lambdas[chosen - 1] if chosen else 0.0)
            else:
                selected = multi_geometry(
                    spec, sample_batch(spec, 3 * n, self.config.seed, n, t), self.config.delta, self.config.gamma,
                    self.config.lambda_strategy, erm_max_iter=self.config.erm_max_iter, strict_erm=self.config.strict_erm,
                )
                output = selected.output
                chosen = selected.outcome.chosen
                row.update(chosen=chosen, geometry=selected.chosen_result.geometry.p if chosen else "origin")  # type: ignore[union-attr]
            size = float(norm(output, self.p))
            row.update(
                subopt=float(self.suboptimality(spec, output)[0]),
                output_norm=size,
                norm_ratio=size / d_star if d_star > 0 else math.inf if size > 0 else 0.0,
            )
            rows.append(row)
        return rows

    def summarize(self, results: List[List[Dict[str, Any]]]) -> ExperimentReport:
        rows = [row for chunk in results for row in chunk]
        summary: Dict[str, Any] = {"method": self.config.method, "geometry": self.p}
        grid = self.config.grid()
        medians = []
        for n in grid:
            subopt = [r["subopt"] for r in rows if r["n"] == n]
            median = quantile(subopt, 0.5)
            medians.append(median)
            summary[f"n{n}.median_subopt"] = median
            summary[f"n{n}.q90_subopt"] = quantile(subopt, 0.9)
            summary[f"n{n}.mean_subopt"] = float(np.mean(subopt))
            if self.config.method == "known_radius":
                spec = self.build_spec(n)
                envelope = (
                    ENVELOPE_CONSTANT * spec.lipschitz_for(self.p) * self._radius(spec)  # type: ignore[operator]
                    * math.sqrt(math.log(2.0 / self.config.delta)) / math.sqrt(n)
                )
                summary[f"n{n}.envelope"] = envelope
                summary[f"n{n}.q90_within_envelope"] = int(summary[f"n{n}.q90_subopt"] <= envelope)
        if self.config.method != "known_radius":
            ratios = [r["norm_ratio"] for r in rows]
            summary["max_norm_ratio"] = float(np.max(ratios))
            summary["norm_within_bound_rate"] = float(np.mean([r <= NORM_FACTOR for r in ratios]))
        if len(grid) >= 2 and all(m > 0 for m in medians):
            slope, stderr = fit_loglog_slope(grid, medians)
        else:
            slope, stderr = math.nan, math.nan
        summary["slope"] = slope
        summary["slope_stderr"] = stderr
        self.logger.info(f"{self.config.method} slope {slope:.3f} ± {stderr:.3f} over n={grid}")
        return self._report(rows, summary)


class AdaptiveRunner(FamilyRunner):
    """Two-stage method alone, over a λ grid, or across geometries"""

    experiment = "adaptive"
    default_family_params = {"shift": "1"}

    def __init__(self, config: ExperimentConfig, runner_id: Optional[str] = None):
        super().__init__(config, runner_id)
        if config.mode != "all" and config.geometry == "all":
            raise ConfigError(f"mode {config.mode} needs a single geometry")
        self.p: NormName = "l2" if config.geometry == "all" else config.geometry  # type: ignore[assignment]
        self.spec = self.build_spec(config.n)

    def trial_tasks(self) -> List[TrialTask]:
        return [TrialTask(t, {"trial": t}) for t in range(self.config.trials)]

    def run_trial(self, task: TrialTask) -> Dict[str, Any]:
        spec, config, t = self.spec, self.config, task.data["trial"]
        d_star = spec.oracle.d_star(self.p)  # type: ignore[union-attr]
        row: Dict[str, Any] = {"trial": t, "mode": config.mode}
        if config.mode == "single":
            result = optimal_adaptive(
                spec, sample_batch(spec, 2 * config.n, config.seed, t), self.p, config.delta, config.lambda_strategy,
                erm_max_iter=config.erm_max_iter, lipschitz_inflation=config.lipschitz_inflation,
                strict_erm=config.strict_erm,
            )
            output = result.output
            row.update(
                geometry=self.p,
                lam=result.geometry.lam,
                stage1_radius=result.stage1_radius,
                erm_converged=int(result.erm.converged),
                erm_residual=result.erm.solver_residual,
            )
        else:
            batch = sample_batch(spec, 3 * config.n, config.seed, t)
            if config.mode == "grid":
                selected = lambda_grid_adaptive(
                    spec, batch, self.p, config.delta, config.gamma,
                    erm_max_iter=config.erm_max_iter, strict_erm=config.strict_erm,
                )
            else:
                selected = multi_geometry(
                    spec, batch, config.delta, config.gamma, config.lambda_strategy,
                    erm_max_iter=config.erm_max_iter, strict_erm=config.strict_erm,
                )
            output = selected.output
            subopt = self.suboptimality(spec, selected.points)
            best = 1 + int(np.argmin(subopt[1:]))
            chosen = selected.outcome.chosen
            tau = selected.outcome.tau
            slack = (1.0 + config.gamma) * float(tau[best])  # type: ignore[index]
            row.update(
                chosen=chosen,
                geometry=selected.chosen_result.geometry.p if chosen else "origin",  # type: ignore[union-attr]
                best_candidate=best,
                best_subopt=float(subopt[best]),
                tau_best=float(tau[best]),  # type: ignore[index]
                selection_bound_ok=int(subopt[chosen] <= subopt[best] + slack + 1e-12),
                erm_converged=int(all(c.erm.converged for c in selected.candidates)),
            )
        size = float(norm(output, self.p))
        row.update(
            subopt=float(self.suboptimality(spec, output)[0]),
            output_norm=size,
            norm_ratio=size / d_star if d_star > 0 else math.inf if size > 0 else 0.0,
        )
        return row

    def summarize(self, results: List[Dict[str, Any]]) -> ExperimentReport:
        rows = list(results)
        subopt = [r["subopt"] for r in rows]
        summary: Dict[str, Any] = {
            "mode": self.config.mode,
            "trials": len(rows),
            "median_subopt": quantile(subopt, 0.5),
            "mean_subopt": float(np.mean(subopt)),
            "max_norm_ratio": float(np.max([r["norm_ratio"] for r in rows])),
            "erm_unconverged": int(sum(1 - r["erm_converged"] for r in rows)),
        }
        if self.config.mode == "single":
            summary["norm_within_bound_rate"] = float(np.mean([r["norm_ratio"] <= NORM_FACTOR for r in rows]))
        else:
            rate = float(np.mean([r["selection_bound_ok"] for r in rows]))
            floor = _binomial_floor(self.config.delta, len(rows))
            summary.update(selection_bound_rate=rate, selection_bound_floor=floor, selection_bound_pass=int(rate >= floor))
        return self._report(rows, summary)


class StrongConvexityRunner(FamilyRunner):
    """Greedy and reliable selection over a μ-grid of strongly convex SGD runs"""

    experiment = "strongconvex"
    default_family = StronglyConvex1D.name

    def __init__(self, config: ExperimentConfig, runner_id: Optional[str] = None):
        super().__init__(config, runner_id)
        self.spec = self.build_spec()
        if self.spec.lipschitz_l2 is None:
            raise ConfigError(f"{self.family} has no Lipschitz constant")
        radius = config.radius if config.radius is not None else self.spec.domain.radius
        if radius is None:
            raise ConfigError("strongconvex needs a radius for unconstrained families")
        self.radius = float(radius)
        self.mus = np.asarray(self.config.mu_grid, dtype=float)

    def trial_tasks(self) -> List[TrialTask]:
        tasks: List[TrialTask] = []
        for n in self.config.grid():
            tasks.extend(_chunked(self.config.trials, self.config.chunk, len(tasks), n=n))
        return tasks

    def run_trial(self, task: TrialTask) -> List[Dict[str, Any]]:
        n, spec, mus = task.data["n"], self.spec, self.mus
        trials = range(task.data["start"], task.data["stop"])
        batches = [sample_batch(spec, 2 * n, self.config.seed, n, t) for t in trials]
        training = np.stack([batch.values[:n] for batch in batches])
        averages = sgd_strongly_convex_batch(
            spec, np.tile(mus, len(batches)), self.radius, np.repeat(training, mus.size, axis=0)
        ).reshape(len(batches), mus.size, spec.dimension)

        rows = []
        for t, batch, candidates in zip(trials, batches, averages):
            points = np.vstack([np.zeros((1, spec.dimension)), candidates])
            losses = LossMatrix.from_problem(spec, points, batch[n:])
            greedy, reliable = _select_pair(
                losses, spec.lipschitz_l2, norm(points, "l2", axis=1),  # type: ignore[arg-type]
                self.config.delta, self.config.gamma, self.config.width_rule,
            )
            subopt = self.suboptimality(spec, points)
            rows.append({
                "n": n,
                "trial": t,
                "greedy_k": greedy.chosen,
                "greedy_mu": float(mus[greedy.chosen - 1]),
                "greedy_subopt": float(subopt[greedy.chosen]),
                "reliable_k": reliable.chosen,
                "reliable_subopt": float(subopt[reliable.chosen]),
            })
        return rows

    def summarize(self, results: List[List[Dict[str, Any]]]) -> ExperimentReport:
        rows = [row for chunk in results for row in chunk]
        grid = self.config.grid()
        summary: Dict[str, Any] = {"width_rule": self.config.width_rule, "radius": self.radius}
        for method in ("greedy", "reliable"):
            medians = []
            for n in grid:
                median = quantile([r[f"{method}_subopt"] for r in rows if r["n"] == n], 0.5)
                summary[f"{method}.n{n}.median_subopt"] = median
                medians.append(median)
            if len(grid) >= 2 and all(m > 0 for m in medians):
                slope, stderr = fit_loglog_slope(grid, medians)
            else:
                slope, stderr = math.nan, math.nan
            summary[f"{method}.slope"] = slope
            summary[f"{method}.slope_stderr"] = stderr
            self.logger.info(f"{method} slope {slope:.3f} ± {stderr:.3f}")
        return self._report(rows, summary)


class ConcentrationRunner(BaseRunner):
    """Monte-Carlo coverage of every width plus the dependent-sum comparison"""

    experiment = "concentration"

    def trial_tasks(self) -> List[TrialTask]:
        return [TrialTask(i, {"bound": name}) for i, name in enumerate(COVERAGE_CHECKS)]

    def run_trial(self, task: TrialTask) -> CoverageResult:
        name = task.data["bound"]
        trials = max(1, int(round(DEFAULT_TRIALS[name] * self.config.trial_scale)))
        return COVERAGE_CHECKS[name](trials=trials, delta=self.config.delta, seed=self.config.seed)

    def comparison_rows(self) -> List[Dict[str, Any]]:
        """Dependent-sum bound against the per-coordinate union bound"""
        rows = []
        for tail_kind, tail in (("a_only", (1.0, 0.0)), ("b_only", (0.0, 1.0))):
            for d in COMPARISON_DIMENSIONS:
                tails = SubGammaTail(*tail, count=d)
                dependent = dependent_sum_bound(tails, self.config.delta)
                union = union_bound_sum(tails, self.config.delta)
                rows.append({
                    "kind": "comparison",
                    "bound": f"dependent_sum_vs_union_{tail_kind}",
                    "d": d,
                    "delta": self.config.delta,
                    "dependent_sum": dependent,
                    "union_bound": union,
                    "ratio": dependent / union,
                })
        return rows

    def summarize(self, results: List[CoverageResult]) -> ExperimentReport:
        rows: List[Dict[str, Any]] = [{"kind": "coverage", **result.to_row()} for result in results]
        rows.extend(self.comparison_rows())
        summary: Dict[str, Any] = {f"{r.bound}.rate": r.rate for r in results}
        summary["all_within_envelope"] = int(all(r.within_envelope for r in results))
        return ExperimentReport(self.experiment, self.config.resolved_items(), rows, summary)


class SelectRunner(BaseRunner):
    """Greedy and reliable selection on a loss-matrix CSV"""

    experiment = "select"

    def __init__(self, config: ExperimentConfig, runner_id: Optional[str] = None):
        if not config.loss_csv:
            raise ConfigError("select needs loss_csv")
        if bool(config.tau) == bool(config.m_values):
            raise ConfigError("select needs exactly one of tau or m_values")
        super().__init__(config, runner_id)

    def trial_tasks(self) -> List[TrialTask]:
        return [TrialTask(0)]

    def run_trial(self, task: TrialTask) -> Tuple[SelectionOutcome, SelectionOutcome]:
        losses = LossMatrix.read_csv(self.config.loss_csv)  # type: ignore[arg-type]
        if self.config.tau:
            widths = widths_from_column(self.config.tau)
        else:
            widths = widths_practical(losses, self.config.m_values)
        return standard_select(losses), reliable_select(losses, widths, self.config.gamma)

    def summarize(self, results: List[Tuple[SelectionOutcome, SelectionOutcome]]) -> ExperimentReport:
        greedy, reliable = results[0]
        rows = greedy.to_rows() + reliable.to_rows()
        summary = {
            "greedy_chosen": greedy.chosen,
            "reliable_chosen": reliable.chosen,
            "width_rule": reliable.width_rule,
            "theta": reliable.theta,
            "safe_set": ";".join(str(k) for k in reliable.safe_set or ()),
        }
        return ExperimentReport(self.experiment, self.config.resolved_items(), rows, summary)


RUNNERS: Dict[str, Type[BaseRunner]] = {
    runner.experiment: runner
    for runner in (
        LowerBoundRunner,
        ScalingRunner,
        ConcentrationRunner,
        SelectRunner,
        AdaptiveRunner,
        StrongConvexityRunner,
    )
}


def create_runner(config: ExperimentConfig) -> BaseRunner:
    return RUNNERS[config.experiment](config)
