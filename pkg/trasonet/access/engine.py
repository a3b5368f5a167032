import logging
from typing import Optional

from trasonet.access.fuzzy import evaluate_candidate, infer
from trasonet.access.handover import adapt_trust, decide_handover, improvement_streak
from trasonet.access.knowledge import KnowledgeBase, update_knowledge
from trasonet.access.models import EngineState, FuzzyInputs, KnowledgeRecord, Rulebase
from trasonet.config import HandoverPolicy
from trasonet.models import NetworkOption, Service

logger = logging.getLogger(__name__)


class AccessEngine:
    """
    Automatic access engine of one vehicle: fuzzy QoS prediction from the local knowledge base and the
    recommender, hysteresis handover, and trust adaptation from the QoS actually achieved.
    """

    def __init__(self, rulebase: Rulebase, policy: HandoverPolicy, kb: Optional[KnowledgeBase] = None):
        rulebase.check()
        self.rulebase = rulebase
        self.policy = policy
        self.kb = kb if kb is not None else KnowledgeBase()
        self.trust = policy.trust
        self.streak = 0
        self.handover_count = 0
        self.last_prediction: Optional[float] = None

    def _inputs(
        self, speed_kmh: float, service: Service, current: NetworkOption, recommendation: NetworkOption
    ) -> FuzzyInputs:
        return FuzzyInputs(
            speed_kmh=speed_kmh, application=service, current_option=current, recommendation=recommendation
        )

    def predict(
        self, speed_kmh: float, service: Service, option: NetworkOption, recommendation: NetworkOption
    ) -> float:
        return infer(self._inputs(speed_kmh, service, option, recommendation), self.rulebase, self.trust, self.kb)

    def select(self, speed_kmh: float, service: Service, recommendation: NetworkOption) -> NetworkOption:
        """
        Network for a new session: the recommended one unless the engine predicts the other is better
        by more than the handover improvement threshold.
        """
        on_rec = self.predict(speed_kmh, service, recommendation, recommendation)
        on_other = self.predict(speed_kmh, service, recommendation.other, recommendation)
        self.streak = 0
        if on_other - on_rec > self.policy.qos_improvement_threshold:
            self.last_prediction = on_other
            return recommendation.other
        self.last_prediction = on_rec
        return recommendation

    def decide(
        self,
        speed_kmh: float,
        service: Service,
        current: NetworkOption,
        recommendation: NetworkOption,
        level_c: Optional[float] = None,
    ) -> NetworkOption:
        """
        Compare the achievable QoS on the other network (Level_l) with the QoS achieved on the current
        one (Level_c, predicted when nothing was achieved yet) and hand over after a sustained improvement.

        :return: The network to use this cycle
        """
        inputs = self._inputs(speed_kmh, service, current, recommendation)
        level_l = evaluate_candidate(inputs, self.rulebase, self.trust, self.kb)
        if level_c is None:
            level_c = infer(inputs, self.rulebase, self.trust, self.kb)

        self.streak = improvement_streak(level_l, level_c, self.policy, self.streak)
        if decide_handover(level_l, level_c, self.policy, self.streak):
            logger.debug(f"Handover {current.value} -> {current.other.value} ({level_c:.2f} -> {level_l:.2f})")
            self.streak = 0
            self.handover_count += 1
            self.last_prediction = level_l
            return current.other

        self.last_prediction = infer(inputs, self.rulebase, self.trust, self.kb)
        return current

    def observe(
        self,
        speed_kmh: float,
        service: Service,
        option: NetworkOption,
        recommendation: NetworkOption,
        achieved_qos: float,
        cycle_index: int,
    ):
        """
        Record the achieved QoS and adapt the trust on the recommender when the network used was the
        recommended one.
        """
        achieved_qos = min(max(achieved_qos, 0.0), 1.0)
        update_knowledge(
            self.kb,
            KnowledgeRecord(
                speed_kmh=speed_kmh,
                application=service,
                option=option,
                achieved_qos=achieved_qos,
                recommendation=recommendation,
                cycle_index=cycle_index,
            ),
        )
        if self.last_prediction is not None and option is recommendation:
            self.trust = adapt_trust(
                self.policy.model_copy(update={"trust": self.trust}), self.last_prediction, achieved_qos
            )

    def end_session(self):
        self.streak = 0
        self.last_prediction = None

    def dump(self) -> EngineState:
        return EngineState(
            trust=self.trust,
            improvement_streak=self.streak,
            handover_count=self.handover_count,
            last_prediction=self.last_prediction,
            knowledge_sizes=self.kb.sizes(),
        )
