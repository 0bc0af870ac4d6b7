"""Uniform finite-difference grids on bounded 2-D domains and strip truncations.

A :class:`Grid` stores the node lattice, the boolean interior mask (True =
unknown, False = Dirichlet boundary or exterior) and the slab diameter of the
interior region.  Grids are immutable after construction and may be shared
freely between threads.  Scalar data attached to a grid lives in
:class:`ScalarField`.

Degenerate 1-D interval grids (``ny == 1``) are supported so that solver
components can be checked against exact one-dimensional solutions.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Sequence

import numpy as np
from numpy.typing import NDArray
from scipy import ndimage

from .errors import FieldError, GridError

# 4-connectivity structuring element used for interior components.
_PLUS = np.array([[0, 1, 0], [1, 1, 1], [0, 1, 0]], dtype=bool)

BINARY_MAGIC = 314159.0
BINARY_VERSION = 1.0


@dataclass(frozen=True, eq=False)
class Grid:
    """Uniform lattice with an interior mask.

    Attributes
    ----------
    spacing : float
        Node spacing, identical in both axes.
    dims : (int, int)
        Node counts ``(nx, ny)`` including boundary layers.  ``ny == 1``
        marks a degenerate 1-D interval grid.
    origin : (float, float)
        Coordinates of node ``(0, 0)``.
    interior_mask : ndarray of bool, shape (nx, ny)
        True at unknowns; False at Dirichlet boundary / exterior nodes.
    slab_diameter : float
        Minimum axis-aligned extent of the interior node set plus one
        spacing on each side.  An upper bound for the true slab diameter,
        which is all the sup-norm estimate needs.
    """

    spacing: float
    dims: tuple[int, int]
    origin: tuple[float, float]
    interior_mask: NDArray[np.bool_]
    slab_diameter: float

    @property
    def ndim(self) -> int:
        return 1 if self.dims[1] == 1 else 2

    @cached_property
    def xs(self) -> NDArray[np.float64]:
        return self.origin[0] + self.spacing * np.arange(self.dims[0])

    @cached_property
    def ys(self) -> NDArray[np.float64]:
        return self.origin[1] + self.spacing * np.arange(self.dims[1])

    def node_coords(self) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
        """Full coordinate lattice as two (nx, ny) arrays."""
        return np.meshgrid(self.xs, self.ys, indexing="ij")

    @cached_property
    def interior_count(self) -> int:
        return int(self.interior_mask.sum())

    @cached_property
    def unknown_index(self) -> NDArray[np.int64]:
        """(nx, ny) map from node to unknown number, -1 outside the interior."""
        idx = np.full(self.dims, -1, dtype=np.int64)
        idx[self.interior_mask] = np.arange(self.interior_count)
        return idx

    @cached_property
    def dirichlet_mask(self) -> NDArray[np.bool_]:
        """Non-interior nodes touching the interior (8-connected ring, so a
        rectangle's corners count as boundary)."""
        grown = ndimage.binary_dilation(self.interior_mask, structure=np.ones((3, 3), bool))
        return grown & ~self.interior_mask

    def distance_to_boundary(self, point: Sequence[float]) -> float:
        """Distance from ``point`` to the nearest non-interior node."""
        X, Y = self.node_coords()
        outside = ~self.interior_mask
        d2 = (X[outside] - point[0]) ** 2 + (Y[outside] - point[1]) ** 2
        return float(np.sqrt(d2.min()))


def _validate(grid: Grid) -> Grid:
    nx, ny = grid.dims
    if grid.spacing <= 0.0:
        raise GridError(f"spacing must be positive, got {grid.spacing}")
    if ny == 1:
        if nx < 3:
            raise GridError(f"1-D grid needs nx >= 3, got {nx}")
    elif nx < 3 or ny < 3:
        raise GridError(f"2-D grid needs nx, ny >= 3, got {grid.dims}")
    mask = grid.interior_mask
    if mask.shape != grid.dims:
        raise GridError("interior mask shape does not match dims")
    if not mask.any():
        raise GridError("grid has no interior node")
    # Stencil neighbours of every interior node must exist in index range.
    if mask[0, :].any() or mask[-1, :].any():
        raise GridError("interior node on the x index edge has no stencil neighbour")
    if ny > 1 and (mask[:, 0].any() or mask[:, -1].any()):
        raise GridError("interior node on the y index edge has no stencil neighbour")
    _, n_components = ndimage.label(mask, structure=_PLUS)
    if n_components != 1:
        raise GridError(f"interior is not 4-connected ({n_components} components)")
    expected = _slab_from_mask(mask, grid.spacing, grid.ndim)
    if not np.isclose(grid.slab_diameter, expected, rtol=1e-12, atol=0.0):
        raise GridError(
            f"slab diameter {grid.slab_diameter} inconsistent with interior extent {expected}"
        )
    grid.interior_mask.setflags(write=False)
    return grid


def _slab_from_mask(mask: NDArray[np.bool_], spacing: float, ndim: int) -> float:
    ii, jj = np.nonzero(mask)
    extent_x = (ii.max() - ii.min()) * spacing + 2.0 * spacing
    if ndim == 1:
        return float(extent_x)
    extent_y = (jj.max() - jj.min()) * spacing + 2.0 * spacing
    return float(min(extent_x, extent_y))


def _snap_count(lo: float, hi: float, spacing: float, axis: str) -> int:
    width = hi - lo
    if not width > 0.0:
        raise GridError(f"degenerate {axis} extent ({lo}, {hi})")
    n = int(round(width / spacing))
    # Counts are snapped to the nearest integer; exact configs divide evenly.
    if n < 2:
        raise GridError(
            f"spacing {spacing} too coarse for {axis} extent ({lo}, {hi}): no interior node"
        )
    return n


def build_rectangle(
    x_extent: tuple[float, float],
    y_extent: tuple[float, float],
    spacing: float,
) -> Grid:
    """Grid on an axis-aligned rectangle; interior nodes strictly inside.

    The extents are snapped to the nearest whole number of spacings
    (requested configurations are expected to divide evenly to within
    1e-9 relative error).
    """
    if spacing <= 0.0:
        raise GridError(f"spacing must be positive, got {spacing}")
    ncx = _snap_count(x_extent[0], x_extent[1], spacing, "x")
    ncy = _snap_count(y_extent[0], y_extent[1], spacing, "y")
    nx, ny = ncx + 1, ncy + 1
    mask = np.zeros((nx, ny), dtype=bool)
    mask[1:-1, 1:-1] = True
    slab = min(ncx, ncy) * spacing
    return _validate(
        Grid(
            spacing=spacing,
            dims=(nx, ny),
            origin=(x_extent[0], y_extent[0]),
            interior_mask=mask,
            slab_diameter=slab,
        )
    )


def build_interval(x_extent: tuple[float, float], spacing: float) -> Grid:
    """Degenerate 1-D grid on an interval (3-point stencil); for oracle tests."""
    if spacing <= 0.0:
        raise GridError(f"spacing must be positive, got {spacing}")
    ncx = _snap_count(x_extent[0], x_extent[1], spacing, "x")
    nx = ncx + 1
    mask = np.zeros((nx, 1), dtype=bool)
    mask[1:-1, 0] = True
    return _validate(
        Grid(
            spacing=spacing,
            dims=(nx, 1),
            origin=(x_extent[0], 0.0),
            interior_mask=mask,
            slab_diameter=ncx * spacing,
        )
    )


def build_masked(
    indicator: Callable[[NDArray[np.float64], NDArray[np.float64]], NDArray[np.bool_]],
    x_extent: tuple[float, float],
    y_extent: tuple[float, float],
    spacing: float,
) -> Grid:
    """Staircase grid: interior nodes where the indicator holds at the node
    and at all four neighbours; the largest 4-connected component is kept.

    ``indicator`` receives coordinate arrays and must return a boolean array
    (a scalar predicate is vectorised automatically).
    """
    box = build_rectangle(x_extent, y_extent, spacing)
    X, Y = box.node_coords()
    ind = indicator(X, Y)
    if not isinstance(ind, np.ndarray) or ind.shape != X.shape:
        ind = np.vectorize(indicator, otypes=[bool])(X, Y)
    ind = ind.astype(bool)
    mask = np.zeros_like(ind)
    mask[1:-1, 1:-1] = (
        ind[1:-1, 1:-1]
        & ind[:-2, 1:-1]
        & ind[2:, 1:-1]
        & ind[1:-1, :-2]
        & ind[1:-1, 2:]
    )
    if not mask.any():
        raise GridError("indicator leaves no interior node in the bounding box")
    labels, n = ndimage.label(mask, structure=_PLUS)
    if n > 1:
        sizes = ndimage.sum_labels(mask, labels, index=np.arange(1, n + 1))
        mask = labels == (1 + int(np.argmax(sizes)))
    slab = _slab_from_mask(mask, spacing, 2)
    return _validate(
        Grid(
            spacing=spacing,
            dims=box.dims,
            origin=box.origin,
            interior_mask=mask,
            slab_diameter=slab,
        )
    )


def truncate_strip(strip_halfwidth: float, length_L: float, spacing: float) -> Grid:
    """Rectangle (-L/2, L/2) x (-halfwidth, halfwidth) truncating an
    infinite strip; slab diameter is the strip width 2*halfwidth."""
    if strip_halfwidth <= 0.0:
        raise GridError(f"halfwidth must be positive, got {strip_halfwidth}")
    if length_L < 4.0 * strip_halfwidth:
        raise GridError(
            f"truncation length {length_L} must be >= 4*halfwidth = {4 * strip_halfwidth}"
        )
    return build_rectangle(
        (-length_L / 2.0, length_L / 2.0),
        (-strip_halfwidth, strip_halfwidth),
        spacing,
    )


@dataclass
class ScalarField:
    """One grid function (a solution component u_l or a coefficient lambda_l).

    Solution fields carry exactly 0 at non-interior nodes; coefficient
    fields may be nonzero everywhere.
    """

    grid: Grid
    values: NDArray[np.float64]

    def __post_init__(self) -> None:
        self.values = np.ascontiguousarray(self.values, dtype=np.float64)
        if self.values.shape != self.grid.dims:
            raise FieldError(
                f"field shape {self.values.shape} does not match grid dims {self.grid.dims}"
            )

    @classmethod
    def zeros(cls, grid: Grid) -> "ScalarField":
        return cls(grid, np.zeros(grid.dims))

    @classmethod
    def constant(cls, grid: Grid, value: float) -> "ScalarField":
        return cls(grid, np.full(grid.dims, float(value)))

    @classmethod
    def from_function(cls, grid: Grid, fn, interior_only: bool = False) -> "ScalarField":
        """Evaluate ``fn(X, Y)`` nodally; optionally zero out non-interior nodes."""
        X, Y = grid.node_coords()
        vals = np.broadcast_to(np.asarray(fn(X, Y), dtype=np.float64), grid.dims).copy()
        if interior_only:
            vals[~grid.interior_mask] = 0.0
        return cls(grid, vals)

    @property
    def sup_norm(self) -> float:
        """Max absolute value over interior nodes."""
        return float(np.abs(self.values[self.grid.interior_mask]).max())

    def interior(self) -> NDArray[np.float64]:
        """Values at interior nodes as a flat vector (unknown ordering)."""
        return self.values[self.grid.interior_mask]

    def assert_finite(self, label: str = "field") -> None:
        if not np.isfinite(self.values).all():
            raise FieldError(f"{label} contains non-finite values")

    def copy(self) -> "ScalarField":
        return ScalarField(self.grid, self.values.copy())


def require_aligned(grid: Grid, *fields: ScalarField) -> None:
    for f in fields:
        if f.grid is not grid:
            raise FieldError("field is not aligned to the given grid")


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------

def write_field_csv(path, field: ScalarField) -> None:
    """Write ``x,y,u`` rows for interior and Dirichlet-boundary nodes.

    Boundary rows carry 0 for solution fields.  Row order is row-major in
    the node lattice (x index outermost); output is byte-deterministic.
    """
    grid = field.grid
    keep = grid.interior_mask | grid.dirichlet_mask
    X, Y = grid.node_coords()
    with open(path, "w", newline="") as fh:
        fh.write("x,y,u\n")
        for x, y, v in zip(X[keep], Y[keep], field.values[keep]):
            fh.write(f"{float(x)!r},{float(y)!r},{float(v)!r}\n")


def read_field_csv(path) -> NDArray[np.float64]:
    """Read an ``x,y,u`` file back as an (n, 3) array."""
    return np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)


def write_fields_binary(path, grid: Grid, fields: Sequence[ScalarField]) -> None:
    """Flat little-endian float64 file: 8-value header
    (magic, version, nx, ny, spacing, origin_x, origin_y, field_count)
    followed by each field's full lattice in row-major order."""
    require_aligned(grid, *fields)
    header = np.array(
        [
            BINARY_MAGIC,
            BINARY_VERSION,
            float(grid.dims[0]),
            float(grid.dims[1]),
            grid.spacing,
            grid.origin[0],
            grid.origin[1],
            float(len(fields)),
        ],
        dtype="<f8",
    )
    with open(path, "wb") as fh:
        fh.write(header.tobytes())
        for f in fields:
            fh.write(np.ascontiguousarray(f.values, dtype="<f8").tobytes())


def read_fields_binary(path) -> tuple[dict, list[NDArray[np.float64]]]:
    """Read a binary field file; returns (header metadata, list of arrays)."""
    with open(path, "rb") as fh:
        raw = fh.read()
    header = np.frombuffer(raw[: 8 * 8], dtype="<f8")
    if len(header) != 8 or header[0] != BINARY_MAGIC:
        raise FieldError(f"not a field file (bad magic in {path})")
    nx, ny = int(header[2]), int(header[3])
    count = int(header[7])
    meta = {
        "version": header[1],
        "nx": nx,
        "ny": ny,
        "spacing": float(header[4]),
        "origin": (float(header[5]), float(header[6])),
        "field_count": count,
    }
    body = np.frombuffer(raw[8 * 8 :], dtype="<f8")
    if body.size != nx * ny * count:
        raise FieldError(f"field file {path} truncated")
    arrays = [body[i * nx * ny : (i + 1) * nx * ny].reshape(nx, ny).copy() for i in range(count)]
    return meta, arrays
