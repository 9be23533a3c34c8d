"""Headless toolkit for the QCM reading-card games.

Card scheduling, the narrative and labyrinth game state machines, the
gameplay-metric log format, a seeded synthetic-player simulator and the
learning-analytics computations run over classroom logs.
"""

__version__ = "0.1.0"
