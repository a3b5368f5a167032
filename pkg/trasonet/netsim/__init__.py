from .capacity import achieved_qos, allocate_capacity, attach, check_attachments, max_min_fair_allocation
from .main import run_simulation
from .models import (
    Attachment,
    BillingAccount,
    CycleRecord,
    DensityBin,
    Grant,
    NodeKind,
    ServiceMetrics,
    SimMetrics,
    write_metrics,
)
from .pricing import accrue_cost
