"""Mean per-job flow experiments over seeded trials"""
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Tuple
import logging

from pydantic import BaseModel

from msched.core.config import settings
from msched.models.job import Trace
from msched.schemas.experiment import ExperimentConfig, ExperimentRow, ExperimentScenario
from msched.services.adversary import AdversaryService, NeedDistribution
from msched.services.harness import HarnessService
from msched.services.scripted import ScriptedOfflineService

logger = logging.getLogger(__name__)


def param_label(value: float) -> str:
    """Short, stable label for an arrival rate or probability"""
    return f"{value:.4g}"


def reference_key(K: int, param: str, policy: str) -> str:
    return f"{K}|{param}|{policy}"


class TrialTask(BaseModel):
    """One seeded realization of one grid cell, shared by every policy"""
    scenario: ExperimentScenario
    K: int
    param: float
    policies: List[str]
    seed: int
    horizon: int
    arrival_rate: float


class RandLbTask(BaseModel):
    """One seeded session of the randomized lower-bound experiment"""
    policy: str
    reference: str
    K: int
    T: int
    L: int
    seed: int


def _trace_for(task: TrialTask) -> Trace:
    if task.scenario == ExperimentScenario.spike:
        return AdversaryService.stochastic_trace(
            task.K, task.arrival_rate, task.horizon, NeedDistribution.spike, task.seed, p=task.param
        )
    if task.scenario == ExperimentScenario.rand_lb:
        return AdversaryService.rand_lb_trace(task.K, task.horizon, 1 / task.K, task.seed)
    return AdversaryService.stochastic_trace(task.K, task.param, task.horizon, NeedDistribution.uniform, task.seed)


def run_trial(task: TrialTask) -> Dict[str, float]:
    """Per-job flow of every policy on one realization"""
    trace = _trace_for(task)
    flows = {}
    for policy in task.policies:
        run = HarnessService.simulate(trace, policy)
        flows[policy] = run.mean_flow
    return flows


def run_rand_lb_trial(task: RandLbTask) -> Tuple[int, int, int]:
    """(policy flow, reference flow, job count) on one realized session"""
    outcome = AdversaryService.rand_lb_session(task.policy, task.K, task.T, L=task.L, seed=task.seed)
    scripted = ScriptedOfflineService.scripted_offline(task.reference, outcome.trace)
    return outcome.run.flow_total, scripted.flow, len(outcome.trace.jobs)


def _map(function, tasks: Iterable, workers: int) -> List:
    tasks = list(tasks)
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as executor:
            return list(executor.map(function, tasks))
    return [function(task) for task in tasks]


# ==================== PRESETS ====================

_ARRIVAL_RATES = [5.0, 10.0, 15.0, 20.0]
_SPIKE_PROBABILITIES = [float(Fraction(n, n + 3)) for n in range(1, 7)]
_SWEEP_K = [8, 16, 32, 64, 128, 256, 512]
_RAND_LB_K = [32, 64, 128, 256]

_REFERENCE_FLOWS: Dict[ExperimentScenario, Dict[str, List[float]]] = {
    ExperimentScenario.rate_k16: {"ra": [23.9, 70.45, 116, 165], "sfa": [90, 251, 391, 536]},
    ExperimentScenario.rate_k32: {"ra": [14.5, 47.71, 79.89, 116.67], "sfa": [75, 203, 332, 463]},
    ExperimentScenario.k_sweep: {"ra": [33, 23.94, 14.5, 9.65, 7.26, 6.6, 5.88],
                                 "sfa": [103, 90, 75, 63.25, 47.79, 36, 24.78]},
    ExperimentScenario.spike: {"ra": [33, 62, 84, 95, 100, 130], "sfa": [103, 145, 164, 186, 192, 199]},
    ExperimentScenario.rand_lb: {"ra": [8.44, 11.8, 23, 53], "sfa": [18.21, 30.3, 69.01, 127.7],
                                 "immediate-unit": [2, 1.5, 1.2, 1.12]},
}


class ExperimentService:
    """Experiment grids, presets and the randomized lower-bound ratio study"""

    @staticmethod
    def preset(
        scenario: ExperimentScenario,
        trials: Optional[int] = None,
        seed_base: Optional[int] = None,
        workers: Optional[int] = None,
        horizon: Optional[int] = None,
    ) -> ExperimentConfig:
        """Grid and reference flow values for a named preset"""
        scenario = ExperimentScenario(scenario)
        policies = ["ra", "sfa"]
        if scenario == ExperimentScenario.rate_k16:
            k_values, params = [16], _ARRIVAL_RATES
        elif scenario == ExperimentScenario.rate_k32:
            k_values, params = [32], _ARRIVAL_RATES
        elif scenario == ExperimentScenario.k_sweep:
            k_values, params = _SWEEP_K, [5.0]
        elif scenario == ExperimentScenario.spike:
            k_values, params = [8], _SPIKE_PROBABILITIES
        elif scenario == ExperimentScenario.rand_lb:
            k_values, params, policies = _RAND_LB_K, [0.0], ["ra", "sfa", "immediate-unit"]
        else:
            k_values, params, policies = [8, 16, 32], [], ["theta0", "thetaT"]

        references: Dict[str, float] = {}
        for policy, values in _REFERENCE_FLOWS.get(scenario, {}).items():
            cells = [(K, param) for K in k_values for param in params]
            for (K, param), value in zip(cells, values):
                references[reference_key(K, ExperimentService.label(scenario, K, param), policy)] = value

        return ExperimentConfig(
            scenario=scenario,
            policies=policies,
            k_values=k_values,
            params=params,
            trials=settings.EXPERIMENT_TRIALS if trials is None else trials,
            seed_base=settings.DEFAULT_SEED if seed_base is None else seed_base,
            horizon=settings.EXPERIMENT_HORIZON if horizon is None else horizon,
            workers=settings.EXPERIMENT_WORKERS if workers is None else workers,
            reference_values=references,
        )

    @staticmethod
    def label(scenario: ExperimentScenario, K: int, param: float) -> str:
        if scenario == ExperimentScenario.rand_lb:
            return f"1/{K}"
        return param_label(param)

    @staticmethod
    def run_experiment(config: ExperimentConfig) -> List[ExperimentRow]:
        """Mean per-job flow for every (K, param, policy) cell"""
        if config.scenario == ExperimentScenario.rand_lb_theta:
            return ExperimentService.rand_lb_experiment(
                config.k_values, config.trials, config.seed_base, config.workers
            )

        params = config.params or [0.0]
        rows: List[ExperimentRow] = []
        for K in config.k_values:
            for param in params:
                tasks = [
                    TrialTask(
                        scenario=config.scenario, K=K, param=param, policies=config.policies,
                        seed=config.seed_base + trial, horizon=config.horizon,
                        arrival_rate=config.arrival_rate,
                    )
                    for trial in range(config.trials)
                ]
                results = _map(run_trial, tasks, config.workers)
                label = ExperimentService.label(config.scenario, K, param)
                for policy in config.policies:
                    mean = sum(result[policy] for result in results) / config.trials
                    rows.append(ExperimentRow(
                        scenario=config.scenario.value, K=K, param=label, policy=policy,
                        trials=config.trials, mean_per_job_flow=mean, seed_base=config.seed_base,
                        reference_value=config.reference_values.get(reference_key(K, label, policy)),
                    ))
                logger.info(f"{config.scenario.value} K={K} param={label}: "
                            + ", ".join(f"{row.policy}={row.mean_per_job_flow:.2f}" for row in rows[-len(config.policies):]))
        return rows

    @staticmethod
    def rand_lb_experiment(
        k_values: List[int],
        trials: int,
        seed_base: int = 0,
        workers: int = 1,
    ) -> List[ExperimentRow]:
        """E[F_policy] / E[F_ref] for both waiting rules against their scripted references"""
        rows: List[ExperimentRow] = []
        for K in k_values:
            plans = (
                ("theta0", "rand-lb-wait", K * K, K * K * K),
                ("thetaT", "rand-lb-immediate", K, 0),
            )
            for policy, reference, T, L in plans:
                tasks = [
                    RandLbTask(policy=policy, reference=reference, K=K, T=T, L=L, seed=seed_base + trial)
                    for trial in range(trials)
                ]
                results = _map(run_rand_lb_trial, tasks, workers)
                flow = sum(result[0] for result in results)
                reference_flow = sum(result[1] for result in results)
                jobs = sum(result[2] for result in results)
                ratio = flow / reference_flow if reference_flow else None
                rows.append(ExperimentRow(
                    scenario=ExperimentScenario.rand_lb_theta.value, K=K, param=f"T={T};L={L}",
                    policy=policy, trials=trials, mean_per_job_flow=flow / jobs if jobs else 0.0,
                    seed_base=seed_base,
                    reference_value=reference_flow / jobs if jobs else None,
                    flow_ratio=ratio,
                ))
                logger.info(f"rand-lb-theta K={K} {policy}: E[F]/E[F_ref]={ratio}")
        return rows
