"""Fraud-alert triage: knowledge-area segmentation, rule-based risk
attribution, verified summaries, and declarative chart specs."""

__version__ = "0.1.0"
