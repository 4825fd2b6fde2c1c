"""
Two-phase quantization-aware training with periodic bitwidth reallocation.

Phase one trains the quantized network while, every few iterations, FIT
sensitivities are refreshed on the clipped full-precision model and every
``reallocation_period`` iterations the allocator redistributes the bit budget.
At the phase boundary the bitwidths are frozen to integers and phase two
fine-tunes in hard mode.
"""

import logging
import time
from typing import List, Optional

import numpy as np

from ..allocator import (
    AllocationProblem,
    AllocatorFactory,
    BitAllocation,
    BitAllocator,
    objective,
    round_to_integer,
)
from ..autodiff import Tape, backward
from ..data.dataset import BatchSampler, Dataset
from ..errors import ConstraintError, ContractError, GuardError, NumericError, TrainingAborted
from ..interfaces.training_phase import BasicPhaseTracker, PhaseTracker, TrainingPhase
from ..quantsim import ALPHA_FLOOR, QuantizationMode, set_bitwidth
from ..sensitivity import SensitivityEstimator, SensitivitySnapshot
from .model import ModelSpec, QuantizedMLP
from .optimizer import SGDOptimizer
from .report import (
    BOUNDARY_STAGE,
    PHASE1_STAGE,
    AllocationEvent,
    IterationRecord,
    QuantizerRecord,
    RunReport,
)
from .train_config import TrainConfig

logger = logging.getLogger(__name__)

# Fractional allocations may exceed the budget by this relative amount.
FRACTIONAL_BUDGET_TOLERANCE = 1e-6


def evaluate(model, dataset: Dataset) -> float:
    """
    Argmax accuracy of ``model.predict`` on ``dataset``; 0.0 when it is empty.
    """
    if dataset.is_empty():
        return 0.0
    predictions = np.asarray(model.predict(dataset.features)).reshape(-1)
    return float(np.mean(predictions == dataset.labels))


class QuantizationAwareTrainer:
    """
    Runs one training configuration on one model specification.

    A trainer is single-use per run but may execute several runs in sequence;
    the phase tracker is reset at the start of each.
    """

    def __init__(self, spec: ModelSpec, config: TrainConfig, phase_tracker: Optional[PhaseTracker] = None):
        self.spec = spec
        self.config = config
        self.phase_tracker = phase_tracker or BasicPhaseTracker()
        self.model: Optional[QuantizedMLP] = None

        self._estimator: Optional[SensitivityEstimator] = None
        self._allocator: Optional[BitAllocator] = None
        self._report: Optional[RunReport] = None
        self._last_allocation: Optional[BitAllocation] = None
        self._last_problem: Optional[AllocationProblem] = None

    def train(self, dataset: Dataset, test_set: Optional[Dataset] = None, label: str = "mixed_precision") -> RunReport:
        """Mixed-precision run with reallocation according to the schedule."""
        constraint = self.config.constraint
        self._estimator = SensitivityEstimator(
            self.config.gamma, self.config.sensitivity_period, self.config.clip_sensitivities
        )
        self._allocator = AllocatorFactory.create_allocator(self.config.allocator, self.config.selection)
        model = QuantizedMLP(self.spec, constraint.b_min, constraint.b_max, constraint.b_max)
        return self._run(model, dataset, test_set, label, allocating=True)

    def train_fixed(
        self, dataset: Dataset, bitwidth: Optional[int], test_set: Optional[Dataset] = None
    ) -> RunReport:
        """Same loop with every bitwidth pinned; ``None`` disables quantization."""
        self._estimator = None
        self._allocator = None
        if bitwidth is None:
            model = QuantizedMLP(self.spec, quantized=False)
            label = "full_precision"
        else:
            constraint = self.config.constraint
            b_min = min(constraint.b_min, int(bitwidth))
            b_max = max(constraint.b_max, int(bitwidth))
            model = QuantizedMLP(self.spec, b_min, b_max, int(bitwidth))
            label = f"fixed_{int(bitwidth)}bit"
        return self._run(model, dataset, test_set, label, allocating=False)

    def _check_dataset(self, dataset: Dataset) -> None:
        if dataset.is_empty():
            raise ContractError("cannot train on an empty dataset")
        if dataset.input_dim != self.spec.layer_widths[0]:
            raise ContractError(
                f"dataset has {dataset.input_dim} features, model expects {self.spec.layer_widths[0]}"
            )
        if dataset.num_classes > self.spec.layer_widths[-1]:
            raise ContractError(
                f"dataset has {dataset.num_classes} classes, model outputs {self.spec.layer_widths[-1]}"
            )

    def _run(
        self,
        model: QuantizedMLP,
        dataset: Dataset,
        test_set: Optional[Dataset],
        label: str,
        allocating: bool,
    ) -> RunReport:
        self._check_dataset(dataset)
        config = self.config
        started = time.perf_counter()
        self.model = model
        self._last_allocation = None
        self._last_problem = None
        self._report = RunReport(label, constraint=config.constraint.to_dict() if allocating else None)
        evaluation_set = test_set if test_set is not None else dataset

        seeds = np.random.SeedSequence(config.seed).generate_state(3)
        sampler = BatchSampler(dataset, config.batch_size, int(seeds[0]))
        probe_sampler = BatchSampler(dataset, config.batch_size, int(seeds[1])) if config.separate_probe_batch else None
        noise_rng = np.random.default_rng(int(seeds[2]))

        if model.quantized:
            model.initialize_ranges(dataset)
        param_optimizer = SGDOptimizer(model.parameters(), config.learning_rate, config.momentum)
        alpha_optimizer = SGDOptimizer(model.alphas(), config.alpha_learning_rate, config.momentum, floor=ALPHA_FLOOR)

        phase1_end = config.phase1_iterations if allocating else 0
        self.phase_tracker.reset_phase()
        if allocating and phase1_end > 0:
            if config.mode is QuantizationMode.PQN:
                model.set_mode(QuantizationMode.PQN)
            self.phase_tracker.set_phase(TrainingPhase.MIXED_PRECISION, 0, {"label": label})
        elif not allocating:
            self.phase_tracker.set_phase(TrainingPhase.FINE_TUNING, 0, {"label": label})

        logger.info(
            "[Trainer] %s: %d iterations, %d with reallocation", label, config.iterations, phase1_end
        )
        iteration = 0
        try:
            for iteration in range(config.iterations):
                batch = sampler.next_batch()
                probe_batch = probe_sampler.next_batch() if probe_sampler is not None else batch
                if allocating and iteration == phase1_end:
                    self._enter_fine_tuning(iteration, probe_batch)
                if iteration < phase1_end:
                    if self._estimator.should_update(iteration):
                        self._estimator.update(model, probe_batch)
                    if iteration % config.reallocation_period == 0:
                        self._reallocate(iteration, PHASE1_STAGE)

                loss = self._step(batch, noise_rng, param_optimizer, alpha_optimizer, iteration)
                self._record(iteration, loss, evaluation_set)

            if allocating and phase1_end == config.iterations:
                self._freeze_bitwidths(config.iterations)
        except (NumericError, ConstraintError, GuardError) as e:
            self._report.aborted = True
            self._report.abort_reason = str(e)
            self.phase_tracker.set_phase(TrainingPhase.ABORTED, iteration, {"reason": str(e)})
            self._report.phase_history = self.phase_tracker.get_phase_history()
            self._report.wall_clock = time.perf_counter() - started
            logger.error("[Trainer] %s aborted at iteration %d: %s", label, iteration, e)
            raise TrainingAborted(f"{label} aborted at iteration {iteration}: {e}", self._report) from e

        report = self._report
        if model.quantized:
            states = model.quantizers()
            report.final_allocation = BitAllocation(
                tuple(states), tuple(state.bitwidth for state in states.values()), integral=True
            )
        report.final_accuracy = evaluate(model, evaluation_set)
        self.phase_tracker.set_phase(
            TrainingPhase.FINISHED, config.iterations, {"accuracy": report.final_accuracy}
        )
        report.phase_history = self.phase_tracker.get_phase_history()
        report.wall_clock = time.perf_counter() - started
        logger.info(
            "[Trainer] %s finished: accuracy %.4f, final loss %.4f",
            label, report.final_accuracy, report.iterations[-1].loss,
        )
        return report

    def _step(
        self,
        batch: Dataset,
        noise_rng: np.random.Generator,
        param_optimizer: SGDOptimizer,
        alpha_optimizer: SGDOptimizer,
        iteration: int,
    ) -> float:
        param_optimizer.zero_grad()
        alpha_optimizer.zero_grad()
        with Tape():
            loss = self.model.loss(batch, noise_rng)
            value = loss.item()
            if not np.isfinite(value):
                raise NumericError(f"non-finite training loss at iteration {iteration}")
            backward(loss)
        param_optimizer.step()
        alpha_optimizer.step()
        return value

    def _snapshot(self, iteration: int) -> Optional[SensitivitySnapshot]:
        estimator = self._estimator
        if estimator is None:
            return None
        states = self.model.quantizers()
        if not all(estimator.is_initialized(quantizer_id) for quantizer_id in states):
            return None
        return estimator.snapshot(states, iteration=iteration)

    def _apply(self, allocation: BitAllocation) -> None:
        states = self.model.quantizers()
        for quantizer_id, bitwidth in allocation.as_dict().items():
            set_bitwidth(states[quantizer_id], bitwidth)

    def _record_event(
        self, iteration: int, stage: str, allocation: BitAllocation, problem: AllocationProblem,
        snapshot: Optional[SensitivitySnapshot],
    ) -> None:
        changed = allocation.changed_from(self._last_allocation)
        event = AllocationEvent(iteration, stage, allocation, snapshot, objective(allocation, problem), changed)
        self._report.allocation_events.append(event)
        if self._last_allocation is not None and changed:
            logger.info(
                "[Trainer] iteration %d: %d of %d bitwidths changed", iteration, changed, len(allocation.bitwidths)
            )
        self._last_allocation = allocation
        self._last_problem = problem

    def _reallocate(self, iteration: int, stage: str) -> None:
        constraint = self.config.constraint
        snapshot = self._snapshot(iteration)
        if snapshot is None:
            raise ContractError(f"no sensitivities available for the allocation at iteration {iteration}")
        problem = AllocationProblem.from_snapshot(snapshot)
        allocation = self._allocator.allocate(problem, constraint)
        hard_mode = any(state.mode is QuantizationMode.HARD for state in self.model.quantizers().values())
        if not allocation.integral and (hard_mode or stage == BOUNDARY_STAGE):
            allocation = round_to_integer(allocation, problem, constraint)
        if not constraint.is_satisfied(allocation, problem, rel_tol=FRACTIONAL_BUDGET_TOLERANCE):
            raise ConstraintError(
                f"allocation at iteration {iteration} violates the constraint by "
                f"{constraint.violation(allocation, problem):.3e}"
            )
        self._apply(allocation)
        self._record_event(iteration, stage, allocation, problem, snapshot)
        logger.debug("[Trainer] iteration %d allocation %s", iteration, allocation.bitwidths)

    def _freeze_bitwidths(self, iteration: int) -> None:
        """Round a fractional allocation once and switch everything to hard mode."""
        allocation = self._last_allocation
        if allocation is not None and not allocation.integral:
            rounded = round_to_integer(allocation, self._last_problem, self.config.constraint)
            logger.warning(
                "[Trainer] rounded fractional allocation %s to %s at iteration %d",
                allocation.bitwidths, rounded.bitwidths, iteration,
            )
            self._apply(rounded)
            self._record_event(iteration, BOUNDARY_STAGE, rounded, self._last_problem, self._snapshot(iteration))
        self.model.set_mode(QuantizationMode.HARD)

    def _enter_fine_tuning(self, iteration: int, probe_batch: Dataset) -> None:
        if iteration == 0:
            # Nothing was learned yet: probe once, then allocate once.
            self._estimator.update(self.model, probe_batch)
            self._reallocate(iteration, BOUNDARY_STAGE)
        else:
            self._freeze_bitwidths(iteration)
        self.phase_tracker.set_phase(TrainingPhase.FINE_TUNING, iteration, {"bitwidths": self._last_allocation.as_dict()})

    def _record(self, iteration: int, loss: float, evaluation_set: Dataset) -> None:
        config = self.config
        last = iteration == config.iterations - 1
        accuracy = None
        if config.eval_period and (iteration % config.eval_period == 0 or last):
            accuracy = evaluate(self.model, evaluation_set)
        quantizers = {}
        if iteration % config.log_period == 0 or last:
            snapshot = self._snapshot(iteration)
            for quantizer_id, state in self.model.quantizers().items():
                quantizers[quantizer_id] = QuantizerRecord(
                    role=state.role.value,
                    bitwidth=state.bitwidth if self.model.quantized else None,
                    sensitivity=snapshot.weights[quantizer_id] if snapshot is not None else None,
                    alpha_mean=state.alpha_mean,
                )
        phase = self.phase_tracker.get_current_phase().value
        self._report.iterations.append(IterationRecord(iteration, phase, loss, accuracy, quantizers))


def train(
    spec: ModelSpec,
    config: TrainConfig,
    dataset: Dataset,
    test_set: Optional[Dataset] = None,
    phase_tracker: Optional[PhaseTracker] = None,
) -> RunReport:
    return QuantizationAwareTrainer(spec, config, phase_tracker).train(dataset, test_set)


def fixed_precision_baseline(
    spec: ModelSpec,
    config: TrainConfig,
    bitwidth: Optional[int],
    dataset: Dataset,
    test_set: Optional[Dataset] = None,
    phase_tracker: Optional[PhaseTracker] = None,
) -> RunReport:
    """Training with every quantizer pinned to ``bitwidth`` (``None``: no quantization)."""
    return QuantizationAwareTrainer(spec, config, phase_tracker).train_fixed(dataset, bitwidth, test_set)


def schedule_sweep(
    spec: ModelSpec,
    config: TrainConfig,
    fractions: List[float],
    dataset: Dataset,
    test_set: Optional[Dataset] = None,
) -> List[RunReport]:
    """One run per phase-1 fraction with everything else shared."""
    reports = []
    for fraction in fractions:
        trainer = QuantizationAwareTrainer(spec, config.with_schedule(fraction))
        reports.append(trainer.train(dataset, test_set, label=f"schedule_{fraction:g}"))
    return reports
