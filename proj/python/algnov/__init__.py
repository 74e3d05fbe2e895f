"""Algebraic Novikov spectral sequence and Adams chart engine."""

from ._core import (
    ENGINE_VERSION,
    Config,
    Error,
    IntegrityError,
    InvalidArgument,
    PrecisionExhausted,
    Run,
    WindowTooLarge,
    check_axioms,
    chow_novikov,
    classical_chart,
    differential_length,
    koszul_check,
    regrade,
    right_unit,
    unregrade,
    verify_pages,
)

__all__ = [
    "ENGINE_VERSION",
    "Config",
    "Error",
    "IntegrityError",
    "InvalidArgument",
    "PrecisionExhausted",
    "Run",
    "WindowTooLarge",
    "check_axioms",
    "chow_novikov",
    "classical_chart",
    "differential_length",
    "koszul_check",
    "regrade",
    "right_unit",
    "unregrade",
    "verify_pages",
]
