from enum import Enum
from itertools import product
from typing import Dict, List, Optional, Tuple

from pydantic import BaseModel, Field, field_validator

from trasonet.constants import SPEED_RANGE_KMH
from trasonet.exception import IncompleteRulebaseException
from trasonet.models import NETWORKS, SERVICES, NetworkOption, Service


class SpeedLevel(str, Enum):
    Low = "Low"
    High = "High"


Premise = Tuple[SpeedLevel, Service, NetworkOption, NetworkOption]
"(speed level, application, current option, recommendation)"


class FuzzyInputs(BaseModel):
    speed_kmh: float
    application: Service
    current_option: NetworkOption
    recommendation: NetworkOption

    @field_validator("speed_kmh")
    @classmethod
    def _clamp_speed(cls, value: float) -> float:
        return min(max(float(value), 0.0), SPEED_RANGE_KMH)

    def swapped(self) -> "FuzzyInputs":
        return self.model_copy(update={"current_option": self.current_option.other})


class FuzzyRule(BaseModel):
    """
    If S is `speed`, A is `app`, O is `option` and R is `rec`, then the achievable QoS is `level`.
    """

    speed: SpeedLevel
    app: Service
    option: NetworkOption
    rec: NetworkOption
    level: float = Field(ge=0.0, le=1.0)

    @property
    def premise(self) -> Premise:
        return self.speed, self.app, self.option, self.rec


class Rulebase(BaseModel):
    rules: List[FuzzyRule]

    def check(self):
        """
        :raises IncompleteRulebaseException: Unless there is exactly one rule per premise combination
        """
        premises = [rule.premise for rule in self.rules]
        expected = set(product(SpeedLevel, SERVICES, NETWORKS, NETWORKS))
        missing = expected - set(premises)
        if missing or len(premises) != len(expected):
            raise IncompleteRulebaseException(
                f"rulebase needs exactly one rule per premise, got {len(premises)} rules, missing {sorted(missing)}"
            )


class KnowledgeRecord(BaseModel):
    """
    One observation Q<S, A, O, Q | R>: the QoS achieved at speed S with application A on option O
    while R was recommended.
    """

    speed_kmh: float
    application: Service
    option: NetworkOption
    achieved_qos: float = Field(ge=0.0, le=1.0)
    recommendation: NetworkOption
    cycle_index: int


class EngineState(BaseModel):
    trust: float
    improvement_streak: int
    handover_count: int
    last_prediction: Optional[float]
    knowledge_sizes: Dict[str, int]
