"""Exceptions raised by ocolab."""


class ZeroJumpWeight(ArithmeticError):
    """The one-count weight Tr(J rho) is too small to normalize the jumped state."""

    def __init__(self, weight, threshold):
        self.weight = weight
        self.threshold = threshold
        super().__init__(f"jump weight {weight:.3e} <= threshold {threshold:.1e}")


class NoAcceptedTrials(RuntimeError):
    """A simulated experiment ended without a single photon absorption."""
