"""Adaptive multi-modal CAPTCHA system.

Procedurally generated grid and audio challenges, tabular Q-learning
difficulty adaptation, a hybrid heuristic + linear-SVM human/bot
classifier, an HTTP verification service with an append-only journal,
and a deterministic agent simulator that reproduces the evaluation
metrics at desk scale.
"""

__version__ = "0.1.0"
