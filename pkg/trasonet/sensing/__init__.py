from .entropy import average_entropy, count_entropy, mask_entropy
from .fc_planner import apply_routes, default_start_segments, plan_fc_routes, random_fc_routes
from .io import read_reports_csv, read_traffic_matrix_csv, write_reports_csv, write_traffic_matrix_csv
from .map_matching import map_match, map_match_batch
from .models import FcRoutePlan, GpsReport, TrafficMatrix
from .reports import emit_reports
from .traffic_matrix import build_traffic_matrix, coverage_stats
