from collections import deque
from typing import Deque, Dict, Optional, Tuple

import numpy as np

from trasonet.access.models import KnowledgeRecord, SpeedLevel
from trasonet.constants import KB_CAPACITY, SPEED_RANGE_KMH
from trasonet.models import NetworkOption, Service


def speed_level(speed_kmh: float) -> SpeedLevel:
    return SpeedLevel.Low if speed_kmh <= SPEED_RANGE_KMH / 2 else SpeedLevel.High


class KnowledgeBase:
    """
    Achieved-QoS history of one vehicle, a ring buffer per (application, option) pair.
    """

    def __init__(self, capacity: int = KB_CAPACITY):
        self.capacity = capacity
        self._records: Dict[Tuple[Service, NetworkOption], Deque[KnowledgeRecord]] = {}

    def __len__(self) -> int:
        return sum(len(records) for records in self._records.values())

    def add(self, record: KnowledgeRecord):
        key = (record.application, record.option)
        if key not in self._records:
            self._records[key] = deque(maxlen=self.capacity)
        self._records[key].append(record)

    def estimate(self, speed_kmh: float, application: Service, option: NetworkOption) -> Optional[float]:
        """
        Mean achieved QoS over the records with the same speed level, application and option.
        """
        level = speed_level(speed_kmh)
        values = [
            r.achieved_qos for r in self._records.get((application, option), ()) if speed_level(r.speed_kmh) is level
        ]
        if not values:
            return None
        return float(np.mean(values))

    def sizes(self) -> Dict[str, int]:
        return {f"{app.value}/{option.value}": len(records) for (app, option), records in self._records.items()}


def update_knowledge(kb: KnowledgeBase, record: KnowledgeRecord) -> KnowledgeBase:
    kb.add(record)
    return kb
