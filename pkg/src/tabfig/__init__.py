"""Toolkit for scientific table & figure analysis tasks.

Builds analysis instances from LaTeX/XML paper sources, runs a
plan -> retrieve -> solve -> critique agent pipeline against pluggable
chat-model backends with a 16-tool registry, and scores generated
analyses with rule-based metrics, judge grading, and agent reward
functions.
"""

__version__ = "0.1.0"
