import json
import logging
from pathlib import Path
from typing import Optional, Union

from pydantic import ValidationError

from trasonet.access.models import FuzzyRule, Rulebase
from trasonet.exception import ConfigurationException

logger = logging.getLogger(__name__)

DEFAULT_RULEBASE_PATH = Path(__file__).with_name("rulebase.json")


def load_rulebase(path: Optional[Union[str, Path]] = None) -> Rulebase:
    """
    Load a rulebase from a JSON array of {speed, app, option, rec, level} objects.

    :param path: Rulebase file, the shipped table when None
    :return: A complete rulebase
    :raises ConfigurationException: When the file cannot be read or parsed
    :raises IncompleteRulebaseException: When a premise combination is missing or repeated
    """
    path = Path(path) if path is not None else DEFAULT_RULEBASE_PATH
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
        rulebase = Rulebase(rules=[FuzzyRule.model_validate(item) for item in raw])
    except (OSError, json.JSONDecodeError, TypeError) as e:
        raise ConfigurationException(f"cannot load rulebase {path}: {e}") from e
    except ValidationError as e:
        raise ConfigurationException(f"invalid rulebase {path}: {e}") from e
    rulebase.check()
    logger.debug(f"Loaded {len(rulebase.rules)} fuzzy rules from {path}")
    return rulebase
