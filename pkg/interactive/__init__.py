"""Simulated interactive segmentation"""

from .prompts import correction_prompts, initial_prompt, interior_point, largest_component
from .evaluation import iterative_eval, mask_iou
from .report import InteractiveSample, dataset_interactive_report, run_sample, summarize

__all__ = [
    "correction_prompts",
    "initial_prompt",
    "interior_point",
    "largest_component",
    "iterative_eval",
    "mask_iou",
    "InteractiveSample",
    "dataset_interactive_report",
    "run_sample",
    "summarize",
]
