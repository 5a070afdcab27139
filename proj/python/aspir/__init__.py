"""Answer-set solving with external atoms, inconsistency reasons and chained evaluation."""

from ._aspir import (
    Error,
    LimitExceeded,
    ParseError,
    answer_sets,
    bench_csv,
    evaluate_chain,
    explain,
    is_inconsistent_meta,
    normalize,
)

__all__ = [
    "Error",
    "LimitExceeded",
    "ParseError",
    "answer_sets",
    "bench_csv",
    "evaluate_chain",
    "explain",
    "is_inconsistent_meta",
    "normalize",
]
