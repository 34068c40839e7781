"""
Exception hierarchy for the block-implicit IVP solver

Every error carries a stable ``kind`` identifier. The CLI prints it and maps
it to an exit status, so the identifiers must not change.
"""


class BlockIvpError(Exception):
    """Base class for all errors raised by the package"""

    kind = "block-ivp-error"

    def __init__(self, message=""):
        super().__init__(message)
        self.message = message

    def __str__(self):
        return self.message or self.kind


class InvalidIntervalError(BlockIvpError):
    kind = "invalid-interval"


class InvalidCountError(BlockIvpError):
    kind = "invalid-count"


class UnorderedNodesError(BlockIvpError):
    kind = "unordered-nodes"


class DuplicateNodeError(BlockIvpError):
    kind = "duplicate-node"


class NotEquispacedError(BlockIvpError):
    kind = "not-equispaced"


class InvalidProblemError(BlockIvpError):
    kind = "invalid-problem"


class InvalidConfigError(BlockIvpError):
    kind = "invalid-config"


class SingularSystemError(BlockIvpError):
    kind = "singular-system"


class NewtonDivergenceError(BlockIvpError):
    kind = "newton-divergence"


class NonFiniteStateError(BlockIvpError):
    kind = "non-finite-state"


class MissingNodeError(BlockIvpError):
    kind = "missing-node"


class MissingReferenceError(BlockIvpError):
    kind = "missing-reference"


class UnknownProblemError(BlockIvpError):
    kind = "unknown-problem"


class RequestValidationError(BlockIvpError):
    kind = "invalid-request"


class BlockFailure(BlockIvpError):
    """
    A per-block solver error annotated with the index of the failing block

    Args:
        block_index: Zero-based index of the block that failed
        cause: The original error raised while solving the block
    """

    def __init__(self, block_index, cause):
        self.block_index = block_index
        self.cause = cause
        self.kind = getattr(cause, "kind", "block-ivp-error")
        super().__init__(f"block {block_index} failed ({self.kind}): {cause}")
