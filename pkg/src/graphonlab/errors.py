"""Exception taxonomy shared across the toolkit.

Two families matter to callers: InputError for rejected arguments or files
(CLI exit code 2) and CertificateError for computations that ran but failed
to certify a required bound (CLI exit code 3).
"""


class GraphonLabError(Exception):
    pass


class InputError(GraphonLabError):
    pass


class CertificateError(GraphonLabError):
    pass


# input validation

class AsymmetricMatrix(InputError):
    pass


class OutOfRange(InputError):
    pass


class EmptyGraph(InputError):
    pass


class NotAPermutation(InputError):
    pass


class OutOfDomain(InputError):
    pass


class SizeMismatch(InputError):
    pass


class TooManyParts(InputError):
    pass


class ExactTooLarge(InputError):
    pass


class TooExpensive(InputError):
    def __init__(self, required, limit):
        super().__init__(f"exact sum needs {required} terms, limit {limit}")
        self.required = required
        self.limit = limit


class IllegalWeakening(InputError):
    pass


class DigitOutOfRange(InputError):
    pass


class BlockLimitExceeded(InputError):
    pass


class RenderTooLarge(InputError):
    pass


class MalformedSpectrum(InputError):
    pass


class UnknownSuite(InputError):
    pass


class FormatError(InputError):
    """Malformed .sg/.g/table/manifest file."""


# certificate failures

class AlignmentBudgetExceeded(CertificateError):
    pass


class NonConvergence(CertificateError):
    pass


class TruthMismatch(CertificateError):
    pass
