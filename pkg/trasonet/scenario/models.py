import math
from typing import Dict, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, PrivateAttr

from trasonet.config import Position
from trasonet.models import Axis, NetworkOption, Role, SessionState

Intersection = Tuple[int, int]
"(vertical street index, horizontal street index)"

Heading = Tuple[float, float]

HEADINGS: Tuple[Heading, ...] = ((1.0, 0.0), (0.0, 1.0), (-1.0, 0.0), (0.0, -1.0))

# positions per distance block, bounds the (positions x RSUs) temporaries
_CHUNK = 2048


class Segment(BaseModel):
    """
    One inter-intersection block of a street.
    """

    segment_id: int
    axis: Axis
    street_index: int
    "Index of the street the block lies on."
    block_index: int
    "Index of the block along its street, i.e. of its lower crossing street."
    start_m: float
    end_m: float

    @property
    def length_m(self) -> float:
        return self.end_m - self.start_m


class RoadNetwork(BaseModel):
    """
    Manhattan grid city. Vertical streets run along y at fixed x, horizontal streets along x at fixed y.
    """

    segments: List[Segment]
    segment_length_m: float
    "Mean block length."
    speed_limit_kmh: float
    vertical_streets_m: List[float]
    horizontal_streets_m: List[float]
    map_width_m: float
    map_height_m: float

    _coords: Optional[np.ndarray] = PrivateAttr(default=None)
    _incident: Optional[Dict[Intersection, List[int]]] = PrivateAttr(default=None)
    _by_block: Optional[Dict[Tuple[Axis, int, int], int]] = PrivateAttr(default=None)

    @property
    def n_segments(self) -> int:
        return len(self.segments)

    @property
    def n_vertical(self) -> int:
        return len(self.vertical_streets_m)

    @property
    def n_horizontal(self) -> int:
        return len(self.horizontal_streets_m)

    def coords(self) -> np.ndarray:
        """
        Segment end points as an (n_segments, 4) array of x0, y0, x1, y1.
        """
        if self._coords is None:
            rows = []
            for seg in self.segments:
                if seg.axis is Axis.Vertical:
                    x = self.vertical_streets_m[seg.street_index]
                    rows.append((x, seg.start_m, x, seg.end_m))
                else:
                    y = self.horizontal_streets_m[seg.street_index]
                    rows.append((seg.start_m, y, seg.end_m, y))
            self._coords = np.array(rows, dtype=float).reshape(-1, 4)
        return self._coords

    def endpoints(self, segment_id: int) -> Tuple[Intersection, Intersection]:
        seg = self.segments[segment_id]
        if seg.axis is Axis.Vertical:
            return (seg.street_index, seg.block_index), (seg.street_index, seg.block_index + 1)
        return (seg.block_index, seg.street_index), (seg.block_index + 1, seg.street_index)

    def intersection_xy(self, intersection: Intersection) -> Position:
        v, h = intersection
        return self.vertical_streets_m[v], self.horizontal_streets_m[h]

    def midpoint(self, segment_id: int) -> Position:
        x0, y0, x1, y1 = self.coords()[segment_id]
        return (x0 + x1) / 2.0, (y0 + y1) / 2.0

    def incident(self, intersection: Intersection) -> List[int]:
        if self._incident is None:
            incident: Dict[Intersection, List[int]] = {}
            for seg in self.segments:
                for end in self.endpoints(seg.segment_id):
                    incident.setdefault(end, []).append(seg.segment_id)
            self._incident = incident
        return self._incident.get(intersection, [])

    def neighbors(self, segment_id: int) -> List[int]:
        """
        Segments sharing an end point with `segment_id`, sorted by id.
        """
        result = set()
        for end in self.endpoints(segment_id):
            result.update(self.incident(end))
        result.discard(segment_id)
        return sorted(result)

    def segment_at(self, axis: Axis, street_index: int, block_index: int) -> Optional[int]:
        if self._by_block is None:
            self._by_block = {
                (seg.axis, seg.street_index, seg.block_index): seg.segment_id for seg in self.segments
            }
        return self._by_block.get((axis, street_index, block_index))

    def segment_from(self, intersection: Intersection, heading: Heading) -> Optional[int]:
        """
        The segment leaving `intersection` in direction `heading`, if the grid has one.
        """
        v, h = intersection
        hx, hy = heading
        if hx > 0:
            return self.segment_at(Axis.Horizontal, h, v)
        if hx < 0:
            return self.segment_at(Axis.Horizontal, h, v - 1)
        if hy > 0:
            return self.segment_at(Axis.Vertical, v, h)
        return self.segment_at(Axis.Vertical, v, h - 1)

    def far_end(self, segment_id: int, near: Intersection) -> Intersection:
        a, b = self.endpoints(segment_id)
        return b if a == near else a

    def street_length_in(self, x0: float, x1: float, y0: float, y1: float) -> float:
        """
        Metres of street inside the rectangle [x0, x1) x [y0, y1); the map's far borders count
        towards the last cell.
        """
        length = 0.0
        for x in self.vertical_streets_m:
            if x0 <= x < x1 or (x == x1 == self.map_width_m):
                length += max(0.0, min(y1, self.map_height_m) - max(y0, 0.0))
        for y in self.horizontal_streets_m:
            if y0 <= y < y1 or (y == y1 == self.map_height_m):
                length += max(0.0, min(x1, self.map_width_m) - max(x0, 0.0))
        return length


class SocialSpot(BaseModel):
    position: Position
    mobility_radius_m: float
    n_tiers: int

    def tier_edges(self) -> np.ndarray:
        return np.linspace(0.0, self.mobility_radius_m, self.n_tiers + 1)

    def tier_mid_radii(self) -> np.ndarray:
        edges = self.tier_edges()
        return (edges[:-1] + edges[1:]) / 2.0

    def tier_areas(self) -> np.ndarray:
        edges = self.tier_edges()
        return math.pi * (edges[1:] ** 2 - edges[:-1] ** 2)

    def distance(self, position: Position) -> float:
        return math.hypot(position[0] - self.position[0], position[1] - self.position[1])


class VehicleState(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    vehicle_id: int
    home_spot: int
    position: Position
    speed_kmh: float
    heading: Heading
    "Unit direction along the current street."
    role: Role = Role.Regular
    current_network: Optional[NetworkOption] = None
    active_session: Optional[SessionState] = None


class Deployment(BaseModel):
    """
    Access infrastructure of the city: eNBs cover the whole map, RSUs cover short street stretches.
    """

    enb_positions: List[Position]
    rsu_positions: List[Position]
    rsu_radius_m: float

    _enb: Optional[np.ndarray] = PrivateAttr(default=None)
    _rsu: Optional[np.ndarray] = PrivateAttr(default=None)

    def enb_array(self) -> np.ndarray:
        if self._enb is None:
            self._enb = np.array(self.enb_positions, dtype=float).reshape(-1, 2)
        return self._enb

    def rsu_array(self) -> np.ndarray:
        if self._rsu is None:
            self._rsu = np.array(self.rsu_positions, dtype=float).reshape(-1, 2)
        return self._rsu

    def nearest_enb(self, position: Position) -> int:
        d = np.hypot(*(self.enb_array() - np.asarray(position)).T)
        return int(np.argmin(d))

    def nearest_rsu_in_range(self, position: Position) -> Optional[int]:
        rsu = self.rsu_array()
        if len(rsu) == 0:
            return None
        d = np.hypot(*(rsu - np.asarray(position)).T)
        best = int(np.argmin(d))
        if d[best] <= self.rsu_radius_m:
            return best
        return None

    def nearest_rsus_in_range(self, positions: np.ndarray) -> np.ndarray:
        """
        Batch form of `nearest_rsu_in_range`: the RSU index per position, -1 where none is in range.
        """
        positions = np.asarray(positions, dtype=float).reshape(-1, 2)
        rsu = self.rsu_array()
        result = np.full(len(positions), -1, dtype=int)
        if len(rsu) == 0:
            return result
        for start in range(0, len(positions), _CHUNK):
            chunk = positions[start : start + _CHUNK]
            d = np.hypot(chunk[:, None, 0] - rsu[None, :, 0], chunk[:, None, 1] - rsu[None, :, 1])
            best = np.argmin(d, axis=1)
            in_range = d[np.arange(len(chunk)), best] <= self.rsu_radius_m
            result[start : start + len(chunk)] = np.where(in_range, best, -1)
        return result

    def rsu_covers_rect(self, x0: float, x1: float, y0: float, y1: float) -> bool:
        """
        True if some RSU's coverage disc reaches into the rectangle.
        """
        rsu = self.rsu_array()
        if len(rsu) == 0:
            return False
        dx = np.maximum(np.maximum(x0 - rsu[:, 0], 0.0), rsu[:, 0] - x1)
        dy = np.maximum(np.maximum(y0 - rsu[:, 1], 0.0), rsu[:, 1] - y1)
        return bool(np.any(np.hypot(dx, dy) <= self.rsu_radius_m))
