"""Exceptions raised across the stabilizer pipeline."""


class NonPositivePressure(ValueError):
    pass


class NonPositiveHeight(ValueError):
    pass


class EmptyPlan(ValueError):
    pass


class OutOfPhase(ValueError):
    pass


class QpInfeasible(RuntimeError):

    def __init__(self, message, sample_index=None):
        super().__init__(message)
        self.sample_index = sample_index


class NumericalDivergence(RuntimeError):
    pass


class ScenarioInvalid(ValueError):
    pass


class EmptyLog(ValueError):
    pass


class Fall(RuntimeError):

    def __init__(self, time, reason):
        super().__init__(f"fall at t={time:.3f} s: {reason}")
        self.time = time
        self.reason = reason
