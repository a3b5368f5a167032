from trasonet.ahp.models import ComparisonMatrix
from trasonet.models import Service

# rows and columns: TrafficDensity, Bandwidth, Delay, Cost
VOICE_CRITERIA = ComparisonMatrix.from_rows(
    [
        [1, 5, 3, 7],
        [1 / 5, 1, 1 / 3, 5],
        [1 / 3, 3, 1, 5],
        [1 / 7, 1 / 5, 1 / 5, 1],
    ]
)

VIDEO_CRITERIA = ComparisonMatrix.from_rows(
    [
        [1, 1 / 7, 1 / 5, 1 / 3],
        [7, 1, 3, 5],
        [5, 1 / 3, 1, 3],
        [3, 1 / 5, 1 / 3, 1],
    ]
)


def criteria_matrix(service: Service) -> ComparisonMatrix:
    return VOICE_CRITERIA if service is Service.Voice else VIDEO_CRITERIA
