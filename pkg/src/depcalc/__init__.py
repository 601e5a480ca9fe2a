"""Workbench for graded dependency calculi: checkers, translations, rewriting and noninterference."""

__version__ = "0.1.0"
