"""Exception hierarchy shared by every module of the package."""


class DihedralSVError(Exception):
    """Base class for all package errors."""


class WidthTooLarge(DihedralSVError):
    pass


class ArityMismatch(DihedralSVError):
    pass


class SupportTooLarge(DihedralSVError):
    pass


class DegenerateWeights(DihedralSVError):
    pass


class DependentRows(DihedralSVError):
    pass


class TooLarge(DihedralSVError):
    pass


class NonRealPhase(DihedralSVError):
    pass


class InfeasibleWidth(DihedralSVError):
    pass


class InformationLeak(DihedralSVError):
    """Raised in audit mode when classical code reads the hidden slope."""


class PipelineFailure(DihedralSVError):
    """One attempt of the parity pipeline failed; ``reason`` names the situation."""

    def __init__(self, reason: str, detail: str = ""):
        super().__init__(f"{reason}: {detail}" if detail else reason)
        self.reason = reason


class ProjectionMissed(PipelineFailure):
    def __init__(self, detail: str = ""):
        super().__init__("ProjectionMissed", detail)


class NoValidPair(PipelineFailure):
    def __init__(self, detail: str = ""):
        super().__init__("NoValidPair", detail)


class SVNotFound(PipelineFailure):
    def __init__(self, detail: str = ""):
        super().__init__("SVNotFound", detail)


class TooFewSurvivors(PipelineFailure):
    def __init__(self, detail: str = ""):
        super().__init__("TooFewSurvivors", detail)


class ExhaustedRetries(DihedralSVError):
    """Every allowed attempt failed.  ``failures`` maps reason -> count."""

    def __init__(self, failures: dict, result=None):
        super().__init__(f"exhausted retries: {dict(failures)}")
        self.failures = dict(failures)
        self.result = result
