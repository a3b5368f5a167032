from .filesystem import resolve_output_dir
from .rng import spawn_generators
from .table import read_csv, read_matrix_csv, write_csv, write_matrix_csv
from .threads import shutdown_executor
