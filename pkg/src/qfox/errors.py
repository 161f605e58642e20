"""
errors.py - Exception hierarchy for qfox

Library code raises these; the command line layer in main.py maps them to
return codes.
"""


class QFoxError(Exception):
    """Base class for all qfox errors"""


class ConfigError(QFoxError, ValueError):
    """Invalid experiment configuration or parameter value"""


class EnvContractError(QFoxError):
    """An environment was used outside its contract (bad action, finished episode, bad map)"""


class ObjectiveError(QFoxError):
    """
    An objective evaluation failed.

    Args:
        message: Description of the failure
        agent: Index of the agent whose position was being evaluated
        iteration: Optimizer iteration of the evaluation
    """

    def __init__(self, message: str, agent: int, iteration: int):
        super().__init__(f"{message} (agent {agent}, iteration {iteration})")
        self.message = message
        self.agent = agent
        self.iteration = iteration

    def __reduce__(self):
        return type(self), (self.message, self.agent, self.iteration)


class TuningError(QFoxError):
    """Every tuning run failed"""

    def __init__(self, failures: "list[str]"):
        super().__init__(f"all {len(failures)} run(s) failed: " + "; ".join(failures))
        self.failures = failures

    def __reduce__(self):
        return type(self), (self.failures,)
