"""
Error Types
Shared exception hierarchy; the CLI and HTTP layers map these to exit codes
and status codes.
"""


class ResourceLimitError(RuntimeError):
    """A desk-scale limit (enumeration size, qubit count, ancillas) was exceeded"""


class EnumerationLimitError(ResourceLimitError):
    """Brute-force enumeration requested over too many variables"""


class QubitLimitError(ResourceLimitError):
    """A state vector or register would exceed the configured qubit cap"""


class UnsatisfiableError(ValueError):
    """The operation needs a satisfiable formula (or a non-zero WMC estimate)"""
