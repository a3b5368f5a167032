from typing import Dict, Iterable

import numpy as np

STREAMS = ("placement", "mobility", "sessions", "fleet", "synthetic", "sensing")


def spawn_generators(seed: int, names: Iterable[str] = STREAMS) -> Dict[str, np.random.Generator]:
    """
    Split one run seed into independent named generators.

    Streams are keyed by position in `names`, so a stream keeps its numbers no matter which
    other streams a caller consumes. Paired runs (e.g. Baseline vs TrasoNET) therefore see
    common random numbers for mobility and session arrivals.
    """
    names = list(names)
    children = np.random.SeedSequence(seed).spawn(len(names))
    return {name: np.random.default_rng(child) for name, child in zip(names, children)}
