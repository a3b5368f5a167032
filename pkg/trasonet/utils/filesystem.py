import warnings

from pathlib import Path
from typing import Optional, Union

from trasonet.constants import OUTPUT_ROOT


def resolve_output_dir(path: Optional[Union[str, Path]], root: Optional[str] = None) -> Path:
    """
    Resolve where a command writes its files and make sure the directory exists.

    Absolute paths are used as is, relative ones are placed under the output root
    (`TRASONET_OUTPUT_ROOT`).
    """
    base = Path(root or OUTPUT_ROOT)
    if path is None:
        result = base
    else:
        candidate = Path(path)
        if str(path).startswith("~"):
            candidate = candidate.expanduser()
            warnings.warn(f"Output path starts with ~, it will evaluate to `{candidate}`")
        result = candidate if candidate.is_absolute() else base / candidate

    result.mkdir(parents=True, exist_ok=True)
    return result
