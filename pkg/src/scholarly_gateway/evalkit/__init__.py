"""Evaluation toolkit: k-means dataset construction, answer metrics,
relevancy sweeps, and telemetry statistics."""

from .analysis import (DEFAULT_THRESHOLDS, EvaluationReport, ItemReport, PerfStats,
                       SweepCurves, evaluate_dataset, perf_stats, relevancy_sweep)
from .clustering import ClusterPlan, KmeansResult, kmeans, plan_clusters
from .datasets import (AI_QA_PROMPT, COMPARISON_QUESTION, Comparison, ComparisonPaper,
                       QaItem, StubQuestionLlm, build_ai_qa, build_comparison_qa,
                       load_comparisons, load_items, parse_question_list, save_items)
from .metrics import (MetricReport, bleu1, exact_match, normalize_answer, rouge1,
                      rougeL, score_answer, semantic_score)

__all__ = [
    "AI_QA_PROMPT", "COMPARISON_QUESTION", "ClusterPlan", "Comparison",
    "ComparisonPaper", "DEFAULT_THRESHOLDS", "EvaluationReport", "ItemReport",
    "KmeansResult", "MetricReport", "PerfStats", "QaItem", "StubQuestionLlm",
    "SweepCurves",
    "bleu1", "build_ai_qa", "build_comparison_qa", "evaluate_dataset",
    "exact_match", "kmeans", "load_comparisons", "load_items", "normalize_answer",
    "parse_question_list", "perf_stats", "plan_clusters", "relevancy_sweep",
    "rouge1", "rougeL", "save_items", "score_answer", "semantic_score",
]
