from typing import Optional, Tuple

from trasonet.access.knowledge import KnowledgeBase
from trasonet.access.models import FuzzyInputs, Rulebase, SpeedLevel
from trasonet.constants import DEFAULT_QOS, SPEED_RANGE_KMH


def fuzzify_speed(speed_kmh: float) -> Tuple[float, float]:
    """
    Complementary triangular memberships over [0, 80] km/h.

    :return: (mu_low, mu_high)
    """
    s = min(max(float(speed_kmh), 0.0), SPEED_RANGE_KMH)
    high = s / SPEED_RANGE_KMH
    return 1.0 - high, high


def infer(
    inputs: FuzzyInputs,
    rulebase: Rulebase,
    trust: float,
    kb: Optional[KnowledgeBase] = None,
) -> float:
    """
    Achievable QoS for the inputs.

    Application, option and recommendation are singletons; a rule fires with the speed membership
    of its speed level when the other three premises match. Rules agreeing with the recommendation
    are weighted by `trust`, the others by 1 - trust, and the output is the weighted average of the
    rule levels. When nothing fires the knowledge base estimate is used, 0.5 without one.
    """
    mu_low, mu_high = fuzzify_speed(inputs.speed_kmh)
    membership = {SpeedLevel.Low: mu_low, SpeedLevel.High: mu_high}

    total = 0.0
    weighted = 0.0
    for rule in rulebase.rules:
        if rule.app is not inputs.application or rule.option is not inputs.current_option:
            continue
        strength = membership[rule.speed]
        strength *= trust if rule.rec is inputs.recommendation else 1.0 - trust
        total += strength
        weighted += strength * rule.level

    if total <= 0.0:
        if kb is not None:
            known = kb.estimate(inputs.speed_kmh, inputs.application, inputs.current_option)
            if known is not None:
                return known
        return DEFAULT_QOS
    return min(max(weighted / total, 0.0), 1.0)


def evaluate_candidate(
    inputs: FuzzyInputs,
    rulebase: Rulebase,
    trust: float,
    kb: Optional[KnowledgeBase] = None,
) -> float:
    """
    Achievable QoS (Level_l) on the network the vehicle is not using.
    """
    return infer(inputs.swapped(), rulebase, trust, kb)
