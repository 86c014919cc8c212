"""Rhombic embeddings of the square lattice.

A domain of ``rows x cols`` plaquettes is drawn with vertices at
``z = j + k * exp(i*alpha)``, so every face is a unit rhombus with interior
angles ``alpha`` (at its lower-left and upper-right corners) and
``pi - alpha`` (at the other two).

Local plaquette conventions, used throughout the package::

        3 ---- top (2) ---- 2
         \\                   \\
       left (3)            right (1)
           \\                   \\
            0 --- bottom (0) --- 1

Corner ``k`` sits between slots ``k - 1`` and ``k``. Corners 0 and 2 carry the
angle ``alpha``, corners 1 and 3 carry ``pi - alpha``.

Winding angles are tracked exactly as integer pairs ``(k_pi, k_beta)``
meaning ``k_pi * pi + k_beta * beta``. A strand turning around a vertex of
interior angle ``alpha`` sweeps ``pi - beta``; around a ``pi - alpha``
vertex it sweeps ``beta``. With ``beta = alpha`` this is the turning of the
polygon through plaquette centres. Any ``beta`` keeps the total winding of
a closed loop at ``+-2 pi``; ``beta = pi - alpha`` is the turning of a curve
crossing every edge at right angles.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass
from typing import Mapping

import numpy as np

__all__ = [
    "Sweep",
    "TurnDirection",
    "Turn",
    "RhombicDomain",
    "build_domain",
    "winding_increment",
    "contour_sum",
    "slot_turn",
]


class Sweep(enum.Enum):
    """Winding swept by one turn, as ``(k_pi, k_beta)``."""

    BETA = (0, 1)  # around a pi - alpha vertex
    CO_BETA = (1, -1)  # pi - beta, around an alpha vertex
    HALF = (1, 0)  # outside a straight stretch of boundary
    PI_PLUS_BETA = (1, 1)  # outside a domain corner of angle alpha
    TWO_PI_MINUS_BETA = (2, -1)  # outside a domain corner of angle pi - alpha

    @property
    def coefficients(self) -> tuple[int, int]:
        return self.value


class TurnDirection(enum.Enum):
    LEFT = "left"
    RIGHT = "right"
    STRAIGHT = "straight"
    NONE = "none"


@dataclass(frozen=True)
class Turn:
    """How a strand crosses a cell: direction plus the angle it sweeps."""

    direction: TurnDirection
    sweep: Sweep | None = None

    def coefficients(self) -> tuple[int, int]:
        """Signed ``(k_pi, k_beta)`` of the winding increment."""
        if self.direction is TurnDirection.NONE:
            raise ValueError("a 'none' turn has no winding increment")
        if self.direction is TurnDirection.STRAIGHT:
            return (0, 0)
        if self.sweep is None:
            raise ValueError("left/right turns need a sweep")
        kp, kb = self.sweep.coefficients
        sign = 1 if self.direction is TurnDirection.LEFT else -1
        return (sign * kp, sign * kb)


def winding_increment(turn: Turn, alpha: float, beta: float | None = None) -> float:
    """Winding angle picked up across one plaquette (or boundary arc).

    ``beta`` replaces ``alpha`` in the angle bookkeeping only and defaults
    to ``alpha``.
    """
    if beta is None:
        beta = alpha
    kp, kb = turn.coefficients()
    return kp * math.pi + kb * beta


def slot_turn(slot_in: int, slot_out: int) -> Turn:
    """Turn made by a strand entering a plaquette through ``slot_in``.

    Adjacent slots share a corner; going from slot ``k - 1`` to slot ``k``
    circles corner ``k`` clockwise (a right turn).
    """
    if slot_in == slot_out:
        raise ValueError("a strand cannot enter and leave through the same slot")
    diff = (slot_out - slot_in) % 4
    if diff == 2:
        return Turn(TurnDirection.STRAIGHT)
    corner = slot_out if diff == 1 else slot_in
    kind = Sweep.CO_BETA if corner % 2 == 0 else Sweep.BETA
    return Turn(TurnDirection.RIGHT if diff == 1 else TurnDirection.LEFT, kind)


@dataclass(frozen=True)
class RhombicDomain:
    """Finite rectangle of rhombic plaquettes.

    Attributes:
        rows, cols: plaquette counts.
        alpha: shear angle in (0, pi).
        vertices: complex coordinates, index ``k * (cols + 1) + j``.
        edges: ``(i, j)`` vertex pairs; horizontal edges first, then slanted.
        plaquettes: per face, edge ids in slot order (bottom, right, top, left).
        orientation: per face, +1 where the counter-clockwise traversal
            agrees with the stored edge orientation, else -1.
        boundary: boundary edge ids in counter-clockwise order, starting at
            the lower-left corner.
        boundary_corners: for consecutive boundary edges ``(b[m], b[m+1])``,
            the sweep of an arc joining them outside the domain.
    """

    rows: int
    cols: int
    alpha: float
    vertices: np.ndarray
    edges: tuple[tuple[int, int], ...]
    plaquettes: tuple[tuple[int, int, int, int], ...]
    orientation: tuple[tuple[int, int, int, int], ...]
    boundary: tuple[int, ...]
    boundary_corners: tuple[Sweep, ...]

    @property
    def midpoints(self) -> np.ndarray:
        z = self.vertices
        return np.array([(z[i] + z[j]) / 2 for i, j in self.edges])

    def edge_vector(self, edge: int) -> complex:
        i, j = self.edges[edge]
        return complex(self.vertices[j] - self.vertices[i])

    def vertex_index(self, k: int, j: int) -> int:
        return k * (self.cols + 1) + j

    def horizontal_edge(self, k: int, j: int) -> int:
        """Edge from vertex (k, j) to (k, j + 1)."""
        return k * self.cols + j

    def slanted_edge(self, k: int, j: int) -> int:
        """Edge from vertex (k, j) to (k + 1, j)."""
        return (self.rows + 1) * self.cols + k * (self.cols + 1) + j

    def plaquette_index(self, r: int, c: int) -> int:
        return r * self.cols + c

    def edge_faces(self) -> dict[int, list[int]]:
        faces: dict[int, list[int]] = {e: [] for e in range(len(self.edges))}
        for p, slots in enumerate(self.plaquettes):
            for e in slots:
                faces[e].append(p)
        return faces

    def interior_edges(self) -> list[int]:
        return [e for e, f in self.edge_faces().items() if len(f) == 2]

    def to_dict(self) -> dict:
        return {
            "rows": self.rows,
            "cols": self.cols,
            "alpha": self.alpha,
            "vertices": [[float(z.real), float(z.imag)] for z in self.vertices],
            "edges": [list(e) for e in self.edges],
            "faces": [list(p) for p in self.plaquettes],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: Mapping) -> "RhombicDomain":
        return build_domain(int(data["rows"]), int(data["cols"]), float(data["alpha"]))


def build_domain(rows: int, cols: int, alpha: float) -> RhombicDomain:
    """Build a ``rows x cols`` rhombic domain with shear angle ``alpha``."""
    if rows < 1 or cols < 1:
        raise ValueError(f"domain needs at least one plaquette, got {rows}x{cols}")
    if not 0.0 < alpha < math.pi:
        raise ValueError(f"alpha must lie in (0, pi), got {alpha}")

    omega = complex(math.cos(alpha), math.sin(alpha))
    vertices = np.array(
        [j + k * omega for k in range(rows + 1) for j in range(cols + 1)], dtype=complex
    )

    def v(k: int, j: int) -> int:
        return k * (cols + 1) + j

    edges = [(v(k, j), v(k, j + 1)) for k in range(rows + 1) for j in range(cols)]
    edges += [(v(k, j), v(k + 1, j)) for k in range(rows) for j in range(cols + 1)]

    def h(k: int, j: int) -> int:
        return k * cols + j

    def d(k: int, j: int) -> int:
        return (rows + 1) * cols + k * (cols + 1) + j

    plaquettes = tuple(
        (h(r, c), d(r, c + 1), h(r + 1, c), d(r, c)) for r in range(rows) for c in range(cols)
    )
    orientation = tuple((1, 1, -1, -1) for _ in plaquettes)

    boundary = [h(0, c) for c in range(cols)]
    boundary += [d(r, cols) for r in range(rows)]
    boundary += [h(rows, c) for c in reversed(range(cols))]
    boundary += [d(r, 0) for r in reversed(range(rows))]

    corners: list[Sweep] = []
    for m in range(len(boundary)):
        if m == cols - 1 or m == cols + rows + cols - 1:
            corners.append(Sweep.TWO_PI_MINUS_BETA)  # lower-right, upper-left
        elif m == cols + rows - 1 or m == len(boundary) - 1:
            corners.append(Sweep.PI_PLUS_BETA)  # upper-right, lower-left
        else:
            corners.append(Sweep.HALF)

    return RhombicDomain(
        rows=rows,
        cols=cols,
        alpha=float(alpha),
        vertices=vertices,
        edges=tuple(edges),
        plaquettes=plaquettes,
        orientation=orientation,
        boundary=tuple(boundary),
        boundary_corners=tuple(corners),
    )


def contour_sum(field: Mapping[int, complex], plaquette: int, domain: RhombicDomain) -> complex:
    """Discrete contour integral of ``field`` around one plaquette.

    Sums ``F(midpoint) * (z_j - z_i)`` over the four edges traversed
    counter-clockwise.

    Raises:
        KeyError: if the field is missing a value on one of the edges.
    """
    total = 0j
    for edge, sign in zip(domain.plaquettes[plaquette], domain.orientation[plaquette]):
        if edge not in field:
            raise KeyError(f"field has no value on edge {edge} of plaquette {plaquette}")
        total += field[edge] * sign * domain.edge_vector(edge)
    return total
