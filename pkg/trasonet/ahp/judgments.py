from trasonet.ahp.models import CellState, ComparisonMatrix, Criterion

# (upper density bound in vehicles per street metre, a(VANET, Cellular)); sparse cells favour VANET,
# dense cells favour cellular because RSUs are shared by every vehicle in range
DENSITY_BANDS = (
    (0.01, 5.0),
    (0.02, 3.0),
    (0.04, 1.0),
    (0.06, 1.0 / 3.0),
    (float("inf"), 1.0 / 5.0),
)

# (lower bound of the VANET over cellular served-share ratio, a(VANET, Cellular)) below parity
CROWDED_RSU_BANDS = (
    (0.5, 1.0 / 3.0),
    (0.0, 1.0 / 5.0),
)

NO_VANET = 9.0
LOADED_CELL = 0.5


def _bandwidth(cell_state: CellState) -> float:
    ratio = cell_state.served_share_ratio()
    if ratio >= 1.0:
        return 5.0 if cell_state.cell_load >= LOADED_CELL else 3.0
    for lower, judgment in CROWDED_RSU_BANDS:
        if ratio >= lower:
            return judgment
    return CROWDED_RSU_BANDS[-1][1]


def vanet_over_cellular(cell_state: CellState, criterion: Criterion) -> float:
    """
    Saaty-scale judgment a(VANET, Cellular) for one criterion in one cell.
    """
    if not cell_state.rsu_coverage:
        return 1.0 / NO_VANET
    if criterion is Criterion.TrafficDensity:
        density = max(cell_state.vehicle_density, 0.0)
        for upper, judgment in DENSITY_BANDS:
            if density < upper:
                return judgment
    if criterion is Criterion.Bandwidth:
        return _bandwidth(cell_state)
    if criterion is Criterion.Delay:
        return 1.0 / 5.0
    return 7.0


def score_alternatives(cell_state: CellState, criterion: Criterion) -> ComparisonMatrix:
    """
    2 x 2 judgment over (Cellular, VANET) for `criterion` in the given cell.
    """
    a = 1.0 / vanet_over_cellular(cell_state, criterion)
    return ComparisonMatrix.from_rows([[1.0, a], [1.0 / a, 1.0]])
