from .judgments import score_alternatives
from .models import CRITERIA, CellState, ComparisonMatrix, ConsistencyReport, Criterion, PriorityVector, RecommendationMap
from .priority import consistency, principal_eigen, priority_vector
from .recommend import (
    congestion_grid,
    density_grid,
    recommendation_map,
    rsu_load_grid,
    synthesize,
    write_recommendation_csv,
)
from .tables import VIDEO_CRITERIA, VOICE_CRITERIA, criteria_matrix
