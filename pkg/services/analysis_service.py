#!/usr/bin/env python3
"""
Analysis pipeline: from a source file to a leakage report.

The program is preprocessed and decomposed, the prefix before the split
points is enumerated exactly, and the saved states are sampled in batches
whose budgets are re-allocated after each batch to minimize the variance
of the final estimate.
"""

import logging
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Dict, List, Optional, Tuple

from tqdm import tqdm

from config import MODE_HYBRID, MODE_PRECISE, MODE_STATISTICAL, AnalysisConfig
from decomposition import (
    Decomposition,
    Method,
    build_cfg,
    decompose,
    estimate_ranges,
    force_method,
    to_dot,
)
from decomposition.decomposer import Decomposer
from distributions.joint import JointDistribution
from distributions.matrix_io import write_matrix_csv, write_trace_csv
from engines import EnumerationResult, SavedState, Sampler, enumerate_traces, make_rng
from engines.state import SecretSpace
from estimation import (
    BIAS_COROLLARY,
    BIAS_GENERAL,
    AllocationMode,
    AllocationPlan,
    ComponentResult,
    EstimateReport,
    batch_schedule,
    compute_weights,
    estimate_leakage,
    fuse,
    optimal_allocation,
    uniform_plan,
)
from frontend import Program, format_program, load_program
from resource_managers import Deadline, analysis_deadline, atomic_output
from services.run_report import ComponentSummary, RunReport

logger = logging.getLogger(__name__)

EXACT_COMPONENT_ID = 0


@dataclass
class StatisticalComponent:
    """A saved state to be sampled, with its conditional secret prior."""

    component_id: int
    saved: SavedState
    prior: Dict[int, Fraction]

    @property
    def weight(self) -> Fraction:
        return self.saved.weight


@dataclass
class OutputPaths:
    """Where optional artifacts go; None skips the artifact."""

    matrix_csv: Optional[str] = None
    cfg_dot: Optional[str] = None
    json: Optional[str] = None
    pp_dir: Optional[str] = None
    trace_csv: Optional[str] = None

    @classmethod
    def from_config(cls, config: AnalysisConfig, source: str) -> "OutputPaths":
        """Default locations under the output directory for every enabled flag."""
        base = Path(config.output_dir) / Path(source).stem
        return cls(
            matrix_csv=f"{base}.matrix.csv" if config.emit_matrix else None,
            cfg_dot=f"{base}.dot" if config.emit_cfg else None,
            json=f"{base}.json" if config.emit_json else None,
            pp_dir=config.output_dir if config.emit_pp else None,
            trace_csv=f"{base}.traces.csv" if config.emit_traces else None,
        )


@dataclass
class AnalysisRun:
    """Report plus the intermediate artifacts it was computed from."""

    report: RunReport
    program: Program
    decomposition: Decomposition
    enumeration: EnumerationResult
    joint: JointDistribution
    results: List[ComponentResult] = field(default_factory=list)


class AnalysisService:
    """Runs the complete analysis of one program under one configuration."""

    def __init__(self, config: AnalysisConfig):
        """
        Initialize the service.

        Args:
            config: Validated analysis configuration
        """
        self.config = config
        self.logger = logging.getLogger(__name__)

    # Steps 1 and 2

    def prepare(self, path: str) -> Tuple[Program, Decomposition]:
        """
        Load, preprocess and decompose a program according to the mode.

        Returns:
            (preprocessed program, decomposition)
        """
        program = load_program(path, self.config.constants)
        mode = self.config.mode
        if mode == MODE_HYBRID:
            cfg = build_cfg(program)
            return program, decompose(
                cfg, estimate_ranges(cfg), self.config.cost_rule, self.config.prefix_budget
            )

        method = Method.PRECISE if mode == MODE_PRECISE else Method.SAMPLE
        annotated = force_method(program, method)
        cfg = build_cfg(annotated)
        ranges = estimate_ranges(cfg)
        plan = Decomposer(cfg, ranges).describe({cfg.entry: method})
        return program, Decomposition(plan, annotated, cfg, ranges)

    # Step 3b

    @property
    def known_prior(self) -> bool:
        return self.config.mode == MODE_STATISTICAL and not self.config.plain_estimator

    def sample_component(
        self,
        sampler: Sampler,
        component: StatisticalComponent,
        plan: AllocationPlan,
        batch: int,
    ) -> Optional[ComponentResult]:
        """Sample one component for one batch; None when it was allotted nothing."""
        cid = component.component_id
        n = plan.per_component.get(cid, 0)
        if n <= 0:
            return None
        rng = make_rng(self.config.seed, cid, batch)
        state = component.saved.state
        if component.saved.method is Method.SAMPLE_ABS:
            outputs = sampler.sample_abs(state, n, rng)
            return ComponentResult.abstract_sampled(cid, component.weight, outputs, component.prior)
        if self.known_prior:
            sizes = {x: k for (i, x), k in plan.per_input.items() if i == cid and k > 0}
            counts = sampler.sample_known_prior(state, sizes, rng)
            input_weights = {x: component.weight * p for x, p in component.prior.items()}
            return ComponentResult.known_prior(cid, input_weights, counts)
        return ComponentResult.sampled(cid, component.weight, sampler.sample(state, n, rng))

    def sample_batch(
        self,
        sampler: Sampler,
        components: List[StatisticalComponent],
        plan: AllocationPlan,
        batch: int,
    ) -> List[ComponentResult]:
        with ThreadPoolExecutor(max_workers=self.config.workers) as pool:
            futures = [
                pool.submit(self.sample_component, sampler, c, plan, batch) for c in components
            ]
            results = [f.result() for f in futures]
        return [r for r in results if r is not None]

    def run_sampling(
        self,
        sampler: Sampler,
        components: List[StatisticalComponent],
        exact: List[ComponentResult],
        deadline: Deadline,
    ) -> Tuple[List[ComponentResult], List[Dict[str, object]]]:
        """
        Batched sampling with re-allocation after every batch.

        Returns:
            (merged statistical results, per-batch allocation log)
        """
        schedule = batch_schedule(self.config.total_samples, self.config.realloc_fraction)
        mode = AllocationMode.KNOWN_PRIOR if self.known_prior else AllocationMode.MI
        ids = [c.component_id for c in components]
        floor = self.config.allocation_floor
        keys = sum(len(c.prior) for c in components) if self.known_prior else len(ids)
        if len(schedule) > 1 and schedule[0] < keys * floor:
            self.logger.warning(
                f"Batch budget {schedule[0]} cannot cover {keys} allocation keys; "
                f"sampling in a single batch"
            )
            schedule = [self.config.total_samples]
        merged: Dict[int, ComponentResult] = {}
        log: List[Dict[str, object]] = []

        progress = tqdm(
            schedule,
            desc="Sampling",
            unit="batch",
            disable=not sys.stderr.isatty(),
        )
        for batch, budget in enumerate(progress):
            deadline.check()
            if batch == 0:
                inputs = None
                if self.known_prior:
                    inputs = {c.component_id: list(c.prior) for c in components}
                plan = uniform_plan(ids, budget, floor, inputs)
            else:
                current = exact + [merged[i] for i in sorted(merged)]
                weights = compute_weights(current, fuse(current), mode)
                plan = optimal_allocation(weights, budget, floor)
            for result in self.sample_batch(sampler, components, plan, batch):
                previous = merged.get(result.component_id)
                merged[result.component_id] = (
                    result if previous is None else previous.merged_with(result)
                )
            log.append({"batch": batch, **plan.to_dict()})
            self.logger.debug(f"Batch {batch}: {plan.per_component}")
        progress.close()
        return [merged[i] for i in sorted(merged)], log

    # Whole pipeline

    def run(self, path: str) -> AnalysisRun:
        """
        Analyze one source file.

        Args:
            path: Path of a ``.hyleak`` program

        Returns:
            AnalysisRun holding the report and intermediate artifacts

        Raises:
            FrontendError: On lexical, syntax or preprocessing errors
            EngineError: On trace/step cap violations or program run-time faults
            TimeoutExceededError: If the wall-clock cap is reached
        """
        config = self.config
        self.logger.info(f"Analyzing {path} in {config.mode} mode (seed {config.seed})")
        with analysis_deadline(config.timeout_seconds) as deadline:
            program, decomposition = self.prepare(path)
            cfg = decomposition.cfg
            enumeration = enumerate_traces(cfg, config.trace_cap, deadline)
            space = SecretSpace(cfg.program)

            exact: List[ComponentResult] = []
            if enumeration.outcomes:
                exact.append(ComponentResult.exact(EXACT_COMPONENT_ID, enumeration.outcomes))
            components = [
                StatisticalComponent(i, saved, saved.state.conditional_prior(space))
                for i, saved in enumerate(enumeration.saved, start=EXACT_COMPONENT_ID + 1)
            ]
            self.logger.info(
                f"Precise prefix: {len(enumeration.outcomes)} exact cells, "
                f"{len(components)} components to sample"
            )

            statistical: List[ComponentResult] = []
            allocation_log: List[Dict[str, object]] = []
            if components:
                sampler = Sampler(cfg, config.step_cap, deadline)
                statistical, allocation_log = self.run_sampling(
                    sampler, components, exact, deadline
                )

            results = exact + statistical
            entropy, leakage = estimate_leakage(results, config.alpha, BIAS_GENERAL)
            corollary = None
            if config.corollary:
                corollary = estimate_leakage(results, config.alpha, BIAS_COROLLARY)[1]
            joint = fuse(results)
            elapsed = deadline.elapsed()

        report = RunReport(
            file=path,
            mode=config.mode,
            seed=config.seed,
            alpha=config.alpha,
            entropy=entropy,
            leakage=leakage,
            components=self._summaries(enumeration, components, statistical, leakage),
            warnings=self._warnings(leakage),
            allocation_log=allocation_log,
            plan=decomposition.plan.to_dict(),
            corollary=corollary,
            elapsed_seconds=elapsed,
        )
        self.logger.info(
            f"Leakage {report.leakage_corrected:.6f} bits, CI "
            f"[{report.confidence_interval[0]:.6f}, {report.confidence_interval[1]:.6f}]"
        )
        return AnalysisRun(report, program, decomposition, enumeration, joint, results)

    def _summaries(
        self,
        enumeration: EnumerationResult,
        components: List[StatisticalComponent],
        statistical: List[ComponentResult],
        leakage: EstimateReport,
    ) -> List[ComponentSummary]:
        variances, biases = leakage.per_component_variance, leakage.per_component_bias
        summaries = []
        if enumeration.outcomes:
            summaries.append(ComponentSummary(
                EXACT_COMPONENT_ID, Method.PRECISE.value, 0, float(enumeration.exact_weight)
            ))
        sizes = {r.component_id: r.sample_size for r in statistical}
        for c in components:
            method = c.saved.method.value
            if self.known_prior and c.saved.method is Method.SAMPLE:
                method = "sample_known_prior"
            summaries.append(ComponentSummary(
                component_id=c.component_id,
                method=method,
                line=c.saved.line,
                weight=float(c.weight),
                samples=sizes.get(c.component_id, 0),
                variance=variances.get(c.component_id, 0.0),
                bias=biases.get(c.component_id, 0.0),
            ))
        return summaries

    @staticmethod
    def _warnings(leakage: EstimateReport) -> List[str]:
        warnings = []
        if not leakage.sample_adequate:
            warnings.append(
                f"{leakage.total_samples} samples may be too few for a reliable bias correction"
            )
        if leakage.corrected_estimate < 0:
            warnings.append("bias-corrected leakage is negative; the interval is clamped at 0")
        return warnings

    # Artifacts

    def write_outputs(self, run: AnalysisRun, outputs: OutputPaths) -> List[str]:
        """
        Write the requested artifacts.

        Returns:
            Paths written
        """
        written = []
        if outputs.json:
            with atomic_output(outputs.json) as handle:
                handle.write(run.report.to_json())
            written.append(outputs.json)
        if outputs.cfg_dot:
            d = run.decomposition
            with atomic_output(outputs.cfg_dot) as handle:
                handle.write(to_dot(d.cfg, d.ranges.dot_annotations()))
            written.append(outputs.cfg_dot)
        if outputs.matrix_csv:
            write_matrix_csv(run.joint, outputs.matrix_csv)
            written.append(outputs.matrix_csv)
        if outputs.trace_csv:
            rows = ((t.secret, t.observable, t.probability) for t in run.enumeration.trace_outcomes)
            write_trace_csv(rows, outputs.trace_csv)
            written.append(outputs.trace_csv)
        if outputs.pp_dir:
            stem = Path(run.report.file).stem
            for suffix, program in (
                (".pp", run.program),
                (".components.pp", run.decomposition.program),
            ):
                target = str(Path(outputs.pp_dir) / f"{stem}{suffix}")
                with atomic_output(target) as handle:
                    handle.write(format_program(program))
                written.append(target)
        for path in written:
            self.logger.info(f"Wrote {path}")
        return written


def analyze(path: str, config: AnalysisConfig) -> RunReport:
    """Run the pipeline on ``path`` and return only the report."""
    return AnalysisService(config).run(path).report
