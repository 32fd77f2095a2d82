"""Pseudo-differential operators on graphs and fractal approximants."""

from ._core import (
    Error,
    InvalidArgument,
    Model,
    NumericalError,
    Symbol,
    __version__,
    adjoint_defect,
    apply,
    bmo_norm,
    builtin_symbol,
    builtin_symbol_ids,
    config_hash,
    constant_symbol,
    decompose_residual,
    embedding_check,
    expression_symbol,
    kernel,
    mapping_test,
    multiplier_symbol,
    opnorm,
    paraproduct,
    parse_expression,
    random_s11_symbol,
    recipes,
    report,
    run,
    seminorm,
    sobolev_norm,
)

__all__ = [name for name in dir() if not name.startswith("_")] + ["__version__"]
