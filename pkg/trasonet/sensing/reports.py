from typing import List, Sequence

from trasonet.models import Role
from trasonet.scenario.models import VehicleState
from trasonet.sensing.models import GpsReport

REPORTING_ROLES = (Role.ProbeVehicle, Role.FloatingCar)


def emit_reports(vehicles: Sequence[VehicleState], cycle_index: int) -> List[GpsReport]:
    """
    One report per probe vehicle and floating car, in vehicle order. Regular vehicles stay silent.
    """
    return [
        GpsReport(
            vehicle_id=v.vehicle_id,
            cycle_index=cycle_index,
            position=v.position,
            speed_kmh=v.speed_kmh,
            heading=v.heading,
        )
        for v in vehicles
        if v.role in REPORTING_ROLES
    ]
