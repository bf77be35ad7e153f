"""Exception hierarchy shared by every module."""

from __future__ import annotations


class BPKError(Exception):
    """Base class; ``exit_code`` is what the CLI returns for this failure."""

    exit_code = 10
    kind = "error"

    def to_record(self) -> dict:
        return {"error": self.kind, "message": str(self)}


class ParameterError(BPKError, ValueError):
    exit_code = 11
    kind = "parameter_error"


class DomainError(BPKError, ValueError):
    exit_code = 12
    kind = "domain_error"


class IntegrabilityError(BPKError, ArithmeticError):
    exit_code = 13
    kind = "integrability_error"


class WindowError(BPKError):
    exit_code = 14
    kind = "window_error"

    def __init__(self, message: str, suggested_U: float | None = None):
        super().__init__(message)
        self.suggested_U = suggested_U

    def to_record(self) -> dict:
        rec = super().to_record()
        rec["suggested_U"] = self.suggested_U
        return rec


class InversionQualityError(BPKError):
    exit_code = 15
    kind = "inversion_quality_error"


class ConcentrationError(InversionQualityError):
    exit_code = 16
    kind = "concentration_error"


class ShapeError(BPKError, ValueError):
    exit_code = 17
    kind = "shape_error"


class ResolutionError(BPKError):
    exit_code = 18
    kind = "resolution_error"


class PreconditionError(BPKError):
    exit_code = 19
    kind = "precondition_error"


class DensityError(BPKError):
    exit_code = 20
    kind = "density_error"


class CommutationError(BPKError):
    exit_code = 21
    kind = "commutation_error"

    def __init__(self, message: str, pair: tuple[int, int]):
        super().__init__(message)
        self.pair = pair

    def to_record(self) -> dict:
        rec = super().to_record()
        rec["pair"] = list(self.pair)
        return rec


class ConfigError(BPKError):
    exit_code = 22
    kind = "config_error"
