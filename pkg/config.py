#!/usr/bin/env python3
"""
Configuration module for the leakage analyzer.
Centralizes all tunables (sample budget, caps, seeds, output locations) for easier testing.
"""

import os
import logging
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Dict

from exceptions import ConfigurationError

logger = logging.getLogger(__name__)

# Analysis modes
MODE_PRECISE = "precise"
MODE_STATISTICAL = "statistical"
MODE_HYBRID = "hybrid"
VALID_MODES = (MODE_PRECISE, MODE_STATISTICAL, MODE_HYBRID)

# Cost rules for choosing between precise and statistical analysis of a component
COST_RULE_Z_LE_X = "z-le-x"  # precise when #Z <= #X
COST_RULE_ALWAYS_SAMPLE = "always-sample"
VALID_COST_RULES = (COST_RULE_Z_LE_X, COST_RULE_ALWAYS_SAMPLE)

# Sampling settings
MODE = os.getenv("HYLEAK_MODE", MODE_HYBRID)
TOTAL_SAMPLES = int(os.getenv("HYLEAK_SAMPLES", "50000"))  # total budget, not per component
ALPHA = float(os.getenv("HYLEAK_ALPHA", "0.05"))
SEED = int(os.getenv("HYLEAK_SEED", "0"))
REALLOC_FRACTION = float(os.getenv("HYLEAK_REALLOC_FRACTION", "0.1"))
ALLOCATION_FLOOR = int(os.getenv("HYLEAK_ALLOCATION_FLOOR", "1"))  # per component per batch
WORKERS = int(os.getenv("HYLEAK_WORKERS", "1"))

# Engine guards
TRACE_CAP = int(os.getenv("HYLEAK_TRACE_CAP", "1000000"))  # symbolic states in precise mode
STEP_CAP = int(os.getenv("HYLEAK_STEP_CAP", "1000000"))  # statements per concrete run
TIMEOUT_SECONDS = float(os.getenv("HYLEAK_TIMEOUT", "600"))

# Decomposition settings
PREFIX_BUDGET = int(os.getenv("HYLEAK_PREFIX_BUDGET", "8"))
COST_RULE = os.getenv("HYLEAK_COST_RULE", COST_RULE_Z_LE_X)

# Directory paths
OUTPUT_DIR = os.getenv("HYLEAK_OUTPUT_DIR", "./output")
LOG_DIR = os.getenv("HYLEAK_LOG_DIR", "./logs")
LOG_LEVEL = os.getenv("HYLEAK_LOG_LEVEL", "INFO")


@dataclass
class AnalysisConfig:
    """
    Type-safe analysis configuration with validation.

    One instance describes a complete run: the same program, configuration
    and seed always produce the same report.
    """

    mode: str = MODE
    total_samples: int = TOTAL_SAMPLES
    alpha: float = ALPHA
    seed: int = SEED
    realloc_fraction: float = REALLOC_FRACTION
    allocation_floor: int = ALLOCATION_FLOOR
    workers: int = WORKERS
    trace_cap: int = TRACE_CAP
    step_cap: int = STEP_CAP
    timeout_seconds: float = TIMEOUT_SECONDS
    prefix_budget: int = PREFIX_BUDGET
    cost_rule: str = COST_RULE
    output_dir: str = OUTPUT_DIR

    # Const values supplied outside the source (--const NAME=VALUE)
    constants: Dict[str, int] = field(default_factory=dict)

    # Estimator switches
    plain_estimator: bool = False
    corollary: bool = False

    # Emission flags
    emit_matrix: bool = False
    emit_cfg: bool = False
    emit_json: bool = False
    emit_pp: bool = False
    emit_traces: bool = False

    @classmethod
    def from_env(cls, **overrides: Any) -> 'AnalysisConfig':
        """
        Create an AnalysisConfig from environment defaults plus explicit overrides.

        Args:
            **overrides: Field values taking precedence over the environment

        Returns:
            AnalysisConfig: Validated configuration instance

        Raises:
            ConfigurationError: If any configuration validation fails
        """
        config = replace(cls(), **{k: v for k, v in overrides.items() if v is not None})
        config.validate()
        return config

    def validate(self) -> None:
        """
        Validate the configuration.

        Raises:
            ConfigurationError: If any validation check fails with a descriptive message
        """
        errors = []

        if self.mode not in VALID_MODES:
            errors.append(f"HYLEAK_MODE must be one of {list(VALID_MODES)} (got '{self.mode}')")

        if self.total_samples < 1:
            errors.append(f"HYLEAK_SAMPLES must be positive (got {self.total_samples})")

        if not (0.0 < self.alpha < 1.0):
            errors.append(f"HYLEAK_ALPHA must be between 0 and 1 exclusive (got {self.alpha})")

        if not (0.0 < self.realloc_fraction <= 1.0):
            errors.append(
                f"HYLEAK_REALLOC_FRACTION must be in (0, 1] (got {self.realloc_fraction})"
            )

        if self.allocation_floor < 0:
            errors.append(
                f"HYLEAK_ALLOCATION_FLOOR must be non-negative (got {self.allocation_floor})"
            )

        if self.workers < 1:
            errors.append(f"HYLEAK_WORKERS must be at least 1 (got {self.workers})")

        if self.trace_cap < 1:
            errors.append(f"HYLEAK_TRACE_CAP must be positive (got {self.trace_cap})")

        if self.step_cap < 1:
            errors.append(f"HYLEAK_STEP_CAP must be positive (got {self.step_cap})")

        if self.timeout_seconds <= 0:
            errors.append(f"HYLEAK_TIMEOUT must be positive (got {self.timeout_seconds})")

        if self.prefix_budget < 1:
            errors.append(f"HYLEAK_PREFIX_BUDGET must be at least 1 (got {self.prefix_budget})")

        if self.cost_rule not in VALID_COST_RULES:
            errors.append(
                f"HYLEAK_COST_RULE must be one of {list(VALID_COST_RULES)} "
                f"(got '{self.cost_rule}')"
            )

        # Validate output directory
        if not self.output_dir:
            errors.append("HYLEAK_OUTPUT_DIR must not be empty")
        else:
            output_path = Path(self.output_dir)
            try:
                output_path.mkdir(parents=True, exist_ok=True)
                test_file = output_path / ".write_test"
                try:
                    test_file.touch()
                    test_file.unlink()
                except (OSError, PermissionError) as e:
                    errors.append(f"HYLEAK_OUTPUT_DIR '{self.output_dir}' is not writable: {e}")
            except (OSError, PermissionError) as e:
                errors.append(f"Cannot create HYLEAK_OUTPUT_DIR '{self.output_dir}': {e}")

        if errors:
            error_message = "Configuration validation failed:\n" + "\n".join(
                f"  - {error}" for error in errors
            )
            logger.error(error_message)
            raise ConfigurationError(error_message)

        logger.info("Configuration validation passed")


def validate_config(**overrides: Any) -> AnalysisConfig:
    """
    Load and validate the application configuration.

    Args:
        **overrides: Field values taking precedence over the environment

    Returns:
        AnalysisConfig: Validated configuration instance

    Raises:
        ConfigurationError: If configuration validation fails
    """
    return AnalysisConfig.from_env(**overrides)
