"""
Metric-space domain models.
Finite pointed metric spaces with curvature proxies and soliton samples.
"""

from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from types import MappingProxyType
from typing import Dict, Iterator, List, Mapping, Optional, Tuple

import numpy as np

from grs.exceptions import MissingFieldError, UnknownPointError
from grs.numeric import Number


class SolitonKind(str, Enum):
    """Gradient Ricci soliton type."""
    STEADY = "steady"
    SHRINKING = "shrinking"


@dataclass(frozen=True)
class Edge:
    a: str
    b: str
    length: Number


@dataclass(frozen=True, eq=False)
class MetricSpace:
    """
    Weighted connected graph with its shortest-path metric.

    `points` is sorted lexicographically and indexes the distance table.
    In exact mode the table holds integer ticks and dist = ticks / unit;
    otherwise it holds floats and `unit` is 1.
    """
    points: Tuple[str, ...]
    edges: Tuple[Edge, ...]
    table: np.ndarray
    unit: int
    exact: bool
    index: Mapping[str, int] = field(repr=False)

    def __post_init__(self):
        self.table.setflags(write=False)

    def __len__(self) -> int:
        return len(self.points)

    def __contains__(self, point: str) -> bool:
        return point in self.index

    def position(self, point: str) -> int:
        try:
            return self.index[point]
        except KeyError:
            raise UnknownPointError(f"Unknown point '{point}'", element=point)

    def _value(self, raw) -> Number:
        if self.exact:
            return Fraction(int(raw), self.unit)
        return float(raw)

    def dist(self, a: str, b: str) -> Number:
        return self._value(self.table[self.position(a), self.position(b)])

    def dist_row(self, x: str) -> List[Number]:
        """Distances from x to every point, in `points` order."""
        row = self.table[self.position(x)].tolist()
        if self.exact:
            return [Fraction(t, self.unit) for t in row]
        return row

    def distinct_distances(self) -> List[Number]:
        """Sorted distinct positive pairwise distances."""
        if len(self.points) < 2:
            return []
        upper = self.table[np.triu_indices(len(self.points), k=1)]
        return [self._value(v) for v in np.unique(upper).tolist() if v > 0]

    @property
    def diameter(self) -> Number:
        return self._value(self.table.max())


@dataclass(frozen=True)
class ScalarField:
    """Nonnegative per-point curvature proxy P."""
    values: Mapping[str, Number]

    def __post_init__(self):
        object.__setattr__(self, "values", MappingProxyType(dict(sorted(self.values.items()))))

    def __getitem__(self, point: str) -> Number:
        try:
            return self.values[point]
        except KeyError:
            raise UnknownPointError(f"Field has no value at '{point}'", element=point)

    def __iter__(self) -> Iterator[str]:
        return iter(self.values)

    def __len__(self) -> int:
        return len(self.values)

    def items(self):
        return self.values.items()

    def max(self) -> Number:
        return max(self.values.values())

    def scaled(self, factor: Number) -> "ScalarField":
        return ScalarField({p: v * factor for p, v in self.values.items()})


@dataclass(frozen=True)
class PointedSpace:
    space: MetricSpace
    base: str

    def __post_init__(self):
        self.space.position(self.base)

    def dist_to_base(self, point: str) -> Number:
        return self.space.dist(point, self.base)


@dataclass(frozen=True)
class SolitonSample:
    """
    Per-point soliton data. Optional maps are present for all points or
    absent; operations call `require` for what they need.
    """
    kind: Optional[SolitonKind] = None
    f: Optional[Mapping[str, Number]] = None
    r_scal: Optional[Mapping[str, Number]] = None
    gradf: Optional[Mapping[str, Number]] = None
    vol: Optional[Mapping[str, Number]] = None

    def require(self, *names: str) -> None:
        missing = [n for n in names if getattr(self, n) is None]
        if missing:
            raise MissingFieldError(f"Sample is missing field(s): {', '.join(missing)}", element=missing[0])

    def as_columns(self) -> Dict[str, Optional[Mapping[str, Number]]]:
        return {"f": self.f, "r_scal": self.r_scal, "gradf": self.gradf, "vol": self.vol}
