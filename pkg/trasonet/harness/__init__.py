from .cli import main
from .commands import (
    EXIT_INPUT_ERROR,
    EXIT_INVARIANT_VIOLATION,
    EXIT_OK,
    cmd_ahp,
    cmd_estimate,
    cmd_recommend,
    cmd_simulate,
    parse_sweep,
    read_comparison_csv,
    read_estimate,
)
from .manifest import RunManifest, start_manifest
from .replicas import ReplicaSummary, run_replicas, summarize
