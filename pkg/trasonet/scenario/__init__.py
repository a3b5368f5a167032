from .infrastructure import build_deployment
from .mobility import step_mobility
from .models import Deployment, RoadNetwork, Segment, SocialSpot, VehicleState
from .placement import place_vehicles, radial_density_exponent, snap_to_street
from .road_network import build_road_network, build_social_spots
