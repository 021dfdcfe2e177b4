"""Exception hierarchy shared by every l1rom layer."""

from typing import Optional


class L1RomError(Exception):
    """Base class for all l1rom errors"""


class InvalidInputError(L1RomError, ValueError):
    """Input is non-finite or structurally inconsistent"""


class DivisionGuardError(L1RomError, ArithmeticError):
    """A normalizing quantity is zero"""


class StepRejectedError(L1RomError, RuntimeError):
    """Time step refused: an explicit step beyond the CFL bound or a stalled implicit solve"""

    def __init__(self, message: str, admissible_dt: float):
        super().__init__(message)
        self.admissible_dt = admissible_dt


class UnphysicalStateError(L1RomError, ValueError):
    """Gas state with non-positive density or pressure"""


class NozzleDomainError(L1RomError, ValueError):
    """Position outside the nozzle [0, 1]"""


class ConvergenceError(L1RomError, RuntimeError):
    """Iterative solver did not reach its tolerance"""

    def __init__(self, message: str, final_residual: float, iterations: int):
        super().__init__(message)
        self.final_residual = final_residual
        self.iterations = iterations


class RankDeficiencyError(L1RomError, ArithmeticError):
    """Linear system is singular"""


class StagnationError(L1RomError, RuntimeError):
    """Line search could not decrease the objective"""


class EvaluationError(L1RomError, ArithmeticError):
    """Residual or Jacobian evaluation produced non-finite values"""


class LinearProgramError(L1RomError, RuntimeError):
    """Linear program is unbounded or infeasible"""

    def __init__(self, message: str, reason: str):
        super().__init__(message)
        self.reason = reason


class ProblemSizeError(L1RomError, ValueError):
    """Problem exceeds a configured size cap"""


class DictionaryFormatError(L1RomError, ValueError):
    """Malformed dictionary file"""

    def __init__(self, message: str, line: int, offset: Optional[int] = None):
        location = f"line {line}" if offset is None else f"line {line}, offset {offset}"
        super().__init__(f"{message} ({location})")
        self.line = line
        self.offset = offset


class ConfigError(L1RomError, ValueError):
    """Invalid experiment configuration"""


class GreedyAbortedError(L1RomError, RuntimeError):
    """HDM failure during greedy sampling; carries the partial results"""

    def __init__(self, message: str, dictionary, history):
        super().__init__(message)
        self.dictionary = dictionary
        self.history = history
