#!/usr/bin/env python3
"""
Services module for the leakage analyzer.
Orchestrates a complete analysis run, renders its report and validates fixtures.
"""

from .analysis_service import AnalysisRun, AnalysisService, OutputPaths, analyze
from .run_report import ComponentSummary, RunReport, format_text_report
from .validation_service import CaseResult, OracleCase, ValidationService, ValidationSummary

__all__ = [
    'AnalysisRun',
    'AnalysisService',
    'CaseResult',
    'ComponentSummary',
    'OracleCase',
    'OutputPaths',
    'RunReport',
    'ValidationService',
    'ValidationSummary',
    'analyze',
    'format_text_report',
]
