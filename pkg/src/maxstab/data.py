"""Containers for site geometry and replicated field data."""
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import DataError, DomainError


class Scale(str, Enum):
    GUMBEL = "gumbel"
    FRECHET = "frechet"
    RAW = "raw"


@dataclass(frozen=True)
class SiteGrid:
    """Site coordinates in the plane, one ``(x, y)`` row per site.

    Pairwise-distinct points are required unless ``allow_coincident`` is set,
    which only exists for degenerate test fixtures.
    """

    coords: np.ndarray
    allow_coincident: bool = field(default=False, repr=False, compare=False)

    def __post_init__(self):
        coords = np.array(self.coords, dtype=float)
        if coords.ndim != 2 or coords.shape[1] != 2 or coords.shape[0] < 1:
            raise DomainError("coords must be an (m, 2) array with m >= 1")
        if not np.all(np.isfinite(coords)):
            raise DomainError("coords must be finite")
        if not self.allow_coincident:
            if len(np.unique(coords, axis=0)) != len(coords):
                raise DomainError("sites must be pairwise distinct")
        coords.setflags(write=False)
        object.__setattr__(self, "coords", coords)

    @property
    def m(self):
        return self.coords.shape[0]

    @classmethod
    def regular(cls, nx, ny=None, spacing=1.0, offset=0.5):
        """Regular ``nx`` by ``ny`` grid.

        The default offset puts sites at cell centres, e.g. ``{0.5, ..., 9.5}^2``
        for a 10 x 10 grid inside the square ``[0, 10]^2``. Sites are ordered
        row by row (x varies fastest).
        """
        ny = nx if ny is None else ny
        if nx < 1 or ny < 1:
            raise DomainError("grid dimensions must be positive")
        xs = offset + spacing * np.arange(nx)
        ys = offset + spacing * np.arange(ny)
        gx, gy = np.meshgrid(xs, ys)
        return cls(np.column_stack([gx.ravel(), gy.ravel()]))

    def distances(self):
        diff = self.coords[:, None, :] - self.coords[None, :, :]
        return np.sqrt((diff**2).sum(axis=-1))

    def bounding_box(self):
        return self.coords.min(axis=0), self.coords.max(axis=0)


@dataclass(frozen=True)
class ReplicateMatrix:
    """An ``n_rep x m`` table of field values on a declared marginal scale."""

    values: np.ndarray
    scale: Scale
    grid: SiteGrid | None = None
    site_ids: tuple | None = None

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        if values.ndim != 2:
            raise DataError("replicate matrix must be two-dimensional")
        scale = Scale(self.scale)
        if scale is Scale.FRECHET and not np.all(values > 0):
            raise DomainError("Frechet-scale values must be strictly positive")
        if self.grid is not None and self.grid.m != values.shape[1]:
            raise DataError(
                f"grid has {self.grid.m} sites but matrix has {values.shape[1]} columns"
            )
        site_ids = self.site_ids
        if site_ids is None:
            site_ids = tuple(f"s{j + 1}" for j in range(values.shape[1]))
        site_ids = tuple(str(s) for s in site_ids)
        if len(site_ids) != values.shape[1]:
            raise DataError("number of site ids does not match column count")
        if len(set(site_ids)) != len(site_ids):
            raise DataError("duplicate site ids")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "scale", scale)
        object.__setattr__(self, "site_ids", site_ids)

    @property
    def n_rep(self):
        return self.values.shape[0]

    @property
    def m(self):
        return self.values.shape[1]

    def require_scale(self, scale):
        if self.scale is not Scale(scale):
            raise DataError(f"expected {Scale(scale).value}-scale data, got {self.scale.value}")
