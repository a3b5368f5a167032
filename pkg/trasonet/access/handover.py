from trasonet.config import HandoverPolicy


def improvement_streak(level_l: float, level_c: float, policy: HandoverPolicy, streak: int) -> int:
    """
    Consecutive cycles, this one included, in which the alternative beat the current QoS by more
    than the threshold. Any other cycle resets the count.
    """
    return streak + 1 if level_l - level_c > policy.qos_improvement_threshold else 0


def decide_handover(level_l: float, level_c: float, policy: HandoverPolicy, consecutive_cycles_above: int) -> bool:
    """
    Hand over only when the improvement exceeds the QoS threshold and has done so for at least
    the dwell threshold.
    """
    return (
        level_l - level_c > policy.qos_improvement_threshold
        and consecutive_cycles_above >= policy.dwell_threshold_cycles
    )


def adapt_trust(policy: HandoverPolicy, predicted_qos: float, achieved_qos: float) -> float:
    """
    Exponentially smoothed prediction accuracy of the recommender.

    :return: The new trust, in [0, 1]
    """
    alpha = policy.trust_smoothing
    trust = (1 - alpha) * policy.trust + alpha * (1 - abs(predicted_qos - achieved_qos))
    return min(max(trust, 0.0), 1.0)
