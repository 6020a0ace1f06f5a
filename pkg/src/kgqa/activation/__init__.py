from .engine import (
    ActivationParams,
    ActivationState,
    CrossoverRelation,
    SubgraphResult,
    candidate_answers,
    spread_from,
    spread_step,
    subgraph_search,
)
from .kernels import HAVE_NUMBA, active_backend, numba_disabled

__all__ = [
    "ActivationParams",
    "ActivationState",
    "CrossoverRelation",
    "SubgraphResult",
    "candidate_answers",
    "spread_from",
    "spread_step",
    "subgraph_search",
    "HAVE_NUMBA",
    "active_backend",
    "numba_disabled",
]
