"""Bayesian inversion of a noisy test.

A prior over a hidden state and a channel to an observation give the
posterior channel back from observations to states.

    python demos/bayes.py
"""
from __future__ import annotations

import numpy as np

from wirelogic.protocols import bayes_demo, bayes_invert


def main() -> None:
    prior = np.array([0.01, 0.99])  # ill, healthy
    channel = np.array([[0.9, 0.1], [0.05, 0.95]])  # rows: state -> (positive, negative)
    inv = bayes_invert(prior, channel)
    print("evidence marginal:", inv.marginal.round(4).tolist())
    print("P(ill | positive) = %.4f" % inv.matrix[0, 0])
    print("P(ill | negative) = %.6f" % inv.matrix[1, 0])
    print()
    print(bayes_demo(prior, channel).text())


if __name__ == "__main__":
    main()
