"""Custom exceptions"""


class AppException(Exception):
    """Base application exception"""
    def __init__(self, detail: str, exit_code: int = 1):
        self.detail = detail
        self.exit_code = exit_code
        super().__init__(self.detail)


class ValidationError(AppException):
    """Input failed validation"""
    def __init__(self, detail: str = "Validation error"):
        super().__init__(detail, 2)


class UsageError(AppException):
    """Command-line usage error"""
    def __init__(self, detail: str = "Usage error"):
        super().__init__(detail, 2)


class CapacityExceeded(AppException):
    """A bank was asked to run more server need than it has"""
    def __init__(self, detail: str = "Capacity exceeded"):
        super().__init__(detail, 2)


class UnknownJob(AppException):
    """A decision referenced a job that is not held"""
    def __init__(self, detail: str = "Unknown job"):
        super().__init__(detail, 2)


class PolicyModeMismatch(AppException):
    """Policy cannot run on the trace's need or size mode"""
    def __init__(self, detail: str = "Policy incompatible with trace mode"):
        super().__init__(detail, 2)


class ScenarioMismatch(AppException):
    """Trace does not have the shape a scripted schedule expects"""
    def __init__(self, detail: str = "Trace does not match scenario"):
        super().__init__(detail, 2)


class UnclassifiableSlot(AppException):
    """Adaptive adversary could not classify a slot as full or wasted"""
    def __init__(self, detail: str = "Slot is neither full nor wasted"):
        super().__init__(detail, 2)


class TooLarge(AppException):
    """Instance exceeds the exact solver's limits"""
    def __init__(self, detail: str = "Instance too large for the exact solver"):
        super().__init__(detail, 2)


class SearchBudgetExceeded(AppException):
    """Bounded search gave up before reaching an answer"""
    def __init__(self, detail: str = "Search budget exceeded"):
        super().__init__(detail, 1)
