"""Price-space geometry: open simplex, positive unit sphere, and the flat chart.

Strictly positive price vectors are carried in one of two frames:

* ``simplex`` -- coordinates sum to one (the open unit simplex),
* ``sphere``  -- coordinates have Euclidean norm one (positive part of the
  unit sphere).

The two frames are identified by radial projection, which is smooth and has
an explicit inverse.  A global chart identifies the simplex with an open
subset of ``R^(l-1)`` by dropping the last coordinate.  Excess-demand values
are tangent to the sphere at their base price (that is what Walras' law
says), hence the :class:`TangentVector` type.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

SIMPLEX = "simplex"
SPHERE = "sphere"

FRAME_TOL = 1e-12
TANGENCY_TOL = 1e-10


def _readonly(a) -> np.ndarray:
    out = np.array(a, dtype=float)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class PricePoint:
    """A strictly positive price vector in a declared frame.

    Parameters
    ----------
    coords : array_like
        Strictly positive entries; must satisfy the frame normalisation
        (coordinate sum 1 for ``simplex``, Euclidean norm 1 for ``sphere``)
        within ``1e-12``.
    frame : str
        Either ``"simplex"`` or ``"sphere"``.
    """

    coords: np.ndarray
    frame: str = SIMPLEX

    def __post_init__(self):
        coords = _readonly(self.coords)
        if coords.ndim != 1 or coords.size < 2:
            raise ValueError("price point needs a 1-d vector of length >= 2")
        if not np.all(np.isfinite(coords)):
            raise ValueError("price coordinates must be finite")
        if np.any(coords <= 0.0):
            raise ValueError("price point must be interior (all coordinates > 0)")
        if self.frame == SIMPLEX:
            if abs(coords.sum() - 1.0) > FRAME_TOL:
                raise ValueError("simplex coordinates must sum to 1 within 1e-12")
        elif self.frame == SPHERE:
            if abs(np.linalg.norm(coords) - 1.0) > FRAME_TOL:
                raise ValueError("sphere coordinates must have norm 1 within 1e-12")
        else:
            raise ValueError(f"unknown frame {self.frame!r}")
        object.__setattr__(self, "coords", coords)

    @property
    def goods(self) -> int:
        return self.coords.size

    def simplex_coords(self) -> np.ndarray:
        """Coordinates of this point in the simplex frame."""
        if self.frame == SIMPLEX:
            return self.coords
        return self.coords / self.coords.sum()

    def sphere_coords(self) -> np.ndarray:
        """Coordinates of this point in the sphere frame."""
        if self.frame == SPHERE:
            return self.coords
        return self.coords / np.linalg.norm(self.coords)


@dataclass(frozen=True)
class ChartPoint:
    """Image of an interior simplex point under the drop-last-coordinate chart.

    Coordinates are the first ``l - 1`` simplex coordinates; they are strictly
    positive and sum to strictly less than one.
    """

    coords: np.ndarray

    def __post_init__(self):
        coords = _readonly(np.atleast_1d(self.coords))
        if coords.ndim != 1 or coords.size < 1:
            raise ValueError("chart point needs a 1-d vector of length >= 1")
        if not np.all(np.isfinite(coords)):
            raise ValueError("chart coordinates must be finite")
        if np.any(coords <= 0.0) or coords.sum() >= 1.0:
            raise ValueError(
                "chart point must satisfy coords > 0 and sum(coords) < 1"
            )
        object.__setattr__(self, "coords", coords)

    @property
    def dim(self) -> int:
        return self.coords.size


@dataclass(frozen=True)
class TangentVector:
    """A vector tangent to the positive price sphere at a base point.

    Tangency (``base . components == 0`` within ``1e-10``, relative to the
    component magnitude) is exactly Walras' law for excess-demand values.
    Construction with ``check=False`` skips the tangency test; it exists so
    that rejection paths for non-tangent data can be exercised.
    """

    base: PricePoint
    components: np.ndarray
    check: bool = True

    def __post_init__(self):
        comps = _readonly(self.components)
        if comps.shape != self.base.coords.shape:
            raise ValueError("tangent components must match the base dimension")
        base = self.base
        if base.frame != SPHERE:
            base = simplex_to_sphere(base)
            object.__setattr__(self, "base", base)
        if self.check:
            err = abs(float(base.coords @ comps))
            if err > TANGENCY_TOL * max(1.0, float(np.linalg.norm(comps))):
                raise ValueError(
                    f"vector is not tangent at its base (|p.v| = {err:.3e})"
                )
        object.__setattr__(self, "components", comps)

    @property
    def goods(self) -> int:
        return self.components.size

    def norm(self) -> float:
        return float(np.linalg.norm(self.components))


def simplex_point(coords) -> PricePoint:
    return PricePoint(coords, SIMPLEX)


def sphere_point(coords) -> PricePoint:
    return PricePoint(coords, SPHERE)


def simplex_to_sphere(p: PricePoint) -> PricePoint:
    """Radial projection of a simplex point onto the positive unit sphere."""
    c = p.simplex_coords()
    return PricePoint(c / np.linalg.norm(c), SPHERE)


def sphere_to_simplex(p: PricePoint) -> PricePoint:
    """Radial projection of a sphere point onto the unit simplex."""
    c = p.sphere_coords()
    return PricePoint(c / c.sum(), SIMPLEX)


def chart_embed(c: ChartPoint) -> PricePoint:
    """Inverse chart: append ``1 - sum(coords)`` as the last simplex coordinate."""
    coords = np.append(c.coords, 1.0 - c.coords.sum())
    return PricePoint(coords, SIMPLEX)


def chart_project(p: PricePoint) -> ChartPoint:
    """Chart map: the first ``l - 1`` simplex coordinates of ``p``."""
    return ChartPoint(p.simplex_coords()[:-1])


def tangent_project(p: PricePoint, v) -> TangentVector:
    """Orthogonal projection of ``v`` onto the tangent space at ``p``.

    Returns ``v - (p . v) p`` with ``p`` in sphere coordinates.  Idempotent,
    and the result satisfies the tangency invariant by construction.
    """
    base = p if p.frame == SPHERE else simplex_to_sphere(p)
    v = np.asarray(v, dtype=float)
    if v.shape != base.coords.shape:
        raise ValueError("vector dimension must match the price dimension")
    w = v - (base.coords @ v) * base.coords
    return TangentVector(base, w)


def boundary_margin(p: PricePoint) -> float:
    """Distance of ``p`` to the simplex boundary: its smallest simplex coordinate."""
    return float(p.simplex_coords().min())


# --- raw-array helpers used by the vectorised evaluation core ---------------


def as_price_rows(P) -> np.ndarray:
    """Validate an ``(n, l)`` array of strictly positive price rows."""
    P = np.atleast_2d(np.asarray(P, dtype=float))
    if P.ndim != 2 or P.shape[1] < 2:
        raise ValueError("expected an (n, l) array of price rows with l >= 2")
    if not np.all(np.isfinite(P)) or np.any(P <= 0.0):
        raise ValueError("price rows must be finite and strictly positive")
    return P


def normalize_rows_to_simplex(P) -> np.ndarray:
    """Rescale strictly positive rows so each sums to one."""
    P = as_price_rows(P)
    return P / P.sum(axis=1, keepdims=True)


def chart_rows_embed(C: np.ndarray) -> np.ndarray:
    """Vectorised chart inverse: ``(n, l-1)`` chart rows to ``(n, l)`` simplex rows."""
    C = np.atleast_2d(np.asarray(C, dtype=float))
    last = 1.0 - C.sum(axis=1, keepdims=True)
    return np.hstack([C, last])
