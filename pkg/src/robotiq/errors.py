"""Exception types shared across the package."""

from __future__ import annotations


class RobotIQError(Exception):
    """Base class for all package errors."""


class InvalidInputError(RobotIQError):
    """Numeric argument outside its stated domain (non-finite, wrong sign, ...)."""


class MapError(RobotIQError):
    """Map document could not be parsed; message carries the field path."""


class MapInvariantError(MapError):
    """Map parsed but violates a world invariant.

    `violations` lists every failure found, each naming the offending entity.
    """

    def __init__(self, violations: list[str]):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


class ProtocolError(RobotIQError):
    """Operation called in a state that forbids it (step after done, arm misuse)."""


class CatalogError(RobotIQError):
    """Reference to an unknown location / item / marker / function."""


class SetupError(RobotIQError):
    """Environment could not be prepared (e.g. start-pose sampling exhausted)."""


class BackendError(RobotIQError):
    """Planner backend unreachable, timed out, or answered malformed."""


class ExtractionError(RobotIQError):
    """No parseable plan found in backend output."""


class UnparseableCommandError(RobotIQError):
    """Rule grammar recognized no verb in the command."""

    def __init__(self, text: str, supported_verbs: list[str]):
        self.text = text
        self.supported_verbs = list(supported_verbs)
        super().__init__(
            f"could not parse {text!r}; supported verbs: {', '.join(supported_verbs)}"
        )


class CheckpointMismatchError(RobotIQError):
    """Checkpoint fingerprint incompatible with the target environment."""


class TrainingFailure(RobotIQError):
    """Training aborted (persistent non-finite losses)."""


class NotFoundError(RobotIQError):
    """Unknown session / resource id."""


class CompileError(RobotIQError):
    """Command compilation failed; `stage` is one of parse/backend/extract/validate."""

    def __init__(self, stage: str, message: str, violations: list | None = None):
        self.stage = stage
        self.violations = violations or []
        super().__init__(f"[{stage}] {message}")
