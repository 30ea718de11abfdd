from config import EXIT_CONFIG


class EvoNavError(Exception):
    """Base class for every error the workbench raises on purpose."""
    exit_code = 1


class ConfigError(EvoNavError):
    """Invalid configuration, flag or spec value."""
    exit_code = EXIT_CONFIG


class DomainError(EvoNavError, ValueError):
    """Geometry or kinematics precondition violated (pose outside arena, speed over limit)."""
    exit_code = EXIT_CONFIG


class CodecError(EvoNavError, ValueError):
    """Genome length or network dimension mismatch."""
    exit_code = EXIT_CONFIG


class HarnessError(EvoNavError, RuntimeError):
    """Evaluation harness misuse: unevaluated individuals, colliding starts."""
    exit_code = EXIT_CONFIG


class ReportFormatError(EvoNavError):
    """Malformed history CSV or genome file."""
    exit_code = EXIT_CONFIG
