"""Statistical complexity of message-passing systems."""

from ._scmnet import (
    ScmError,
    ScmResult,
    analyze,
    dimension_axis,
    jsd,
    kl_divergence,
    normalize_set,
    parse_counts,
    q_max,
    simulate,
)

__all__ = [
    "ScmError",
    "ScmResult",
    "analyze",
    "dimension_axis",
    "jsd",
    "kl_divergence",
    "normalize_set",
    "parse_counts",
    "q_max",
    "simulate",
]
