"""Tile catalogues and Boltzmann weight families of the three loop models.

Tiles are described by the strands they draw between the four slots of a
plaquette (see :mod:`parafermions.geometry` for slot and corner labels).
A strand is ``(slot_a, slot_b, colour)``; single-colour models use colour 0.

Orientation of the anisotropic weights. Dense: ``a`` draws arcs around
corners 1 and 3 (angle ``pi - alpha``), ``b`` around corners 0 and 2
(angle ``alpha``). Dilute: ``u1`` is a single arc around a ``pi - alpha``
corner and ``u2`` one around an ``alpha`` corner; ``w1`` draws the arcs
around corners 1 and 3, ``w2`` around corners 0 and 2. These are the
orientations for which the enumerated observable is discretely holomorphic
at the integrable weights. Two-colour: ``w1``/``w2`` are same-colour arc
pairs and ``u1``/``u2`` black-grey arc pairs, each ``1`` around corners 1
and 3; ``v`` is a black-grey crossing.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

__all__ = [
    "ModelId",
    "Tile",
    "WeightSet",
    "SYMBOLS",
    "TILES",
    "DegenerateCouplingError",
    "potts_loop_weights",
    "dense_weights",
    "on_integrable_weights",
    "on_v0_n1_weights",
    "on_v0_dense_weights",
    "c2_integrable_weights",
    "spin_value",
    "six_vertex_map",
    "fugacity_from_eta",
]


class ModelId(str, enum.Enum):
    DENSE = "dense"
    DILUTE = "dilute"
    C2 = "c2"

    @classmethod
    def parse(cls, value: "str | ModelId") -> "ModelId":
        if isinstance(value, cls):
            return value
        aliases = {"potts": "dense", "on": "dilute", "o(n)": "dilute", "c21": "c2"}
        key = str(value).lower()
        return cls(aliases.get(key, key))


SYMBOLS: dict[ModelId, tuple[str, ...]] = {
    ModelId.DENSE: ("a", "b"),
    ModelId.DILUTE: ("t", "u1", "u2", "v", "w1", "w2"),
    ModelId.C2: ("u1", "u2", "v", "w1", "w2"),
}


@dataclass(frozen=True)
class Tile:
    symbol: str
    strands: tuple[tuple[int, int, int], ...]
    name: str = ""

    @property
    def occupancy(self) -> tuple[int | None, ...]:
        """Colour on each of the four slots, ``None`` if empty."""
        occ: list[int | None] = [None] * 4
        for a, b, colour in self.strands:
            occ[a] = colour
            occ[b] = colour
        return tuple(occ)


# arcs around corner k join slots k-1 and k
_ARCS_02 = ((3, 0), (1, 2))
_ARCS_13 = ((0, 1), (2, 3))
_CROSS = ((0, 2), (1, 3))


def _dense_tiles() -> tuple[Tile, ...]:
    return (
        Tile("a", tuple((p, q, 0) for p, q in _ARCS_13), "arcs@13"),
        Tile("b", tuple((p, q, 0) for p, q in _ARCS_02), "arcs@02"),
    )


def _dilute_tiles() -> tuple[Tile, ...]:
    tiles = [Tile("t", (), "empty")]
    for k in range(4):
        symbol = "u2" if k % 2 == 0 else "u1"
        tiles.append(Tile(symbol, (((k - 1) % 4, k, 0),), f"corner{k}"))
    tiles.append(Tile("v", ((0, 2, 0),), "vertical"))
    tiles.append(Tile("v", ((1, 3, 0),), "horizontal"))
    tiles.append(Tile("w1", tuple((p, q, 0) for p, q in _ARCS_13), "arcs@13"))
    tiles.append(Tile("w2", tuple((p, q, 0) for p, q in _ARCS_02), "arcs@02"))
    return tuple(tiles)


def _c2_tiles() -> tuple[Tile, ...]:
    # Two same-colour arcs are the w tiles, a black arc facing a grey arc is
    # a u tile, and only differently coloured strands may cross (v).
    tiles = []
    for colour in (0, 1):
        tiles.append(Tile("w1", tuple((p, q, colour) for p, q in _ARCS_13), f"arcs@13/{colour}{colour}"))
        tiles.append(Tile("w2", tuple((p, q, colour) for p, q in _ARCS_02), f"arcs@02/{colour}{colour}"))
    for first in (0, 1):
        second = 1 - first
        for symbol, arcs, label in (("u1", _ARCS_13, "arcs@13"), ("u2", _ARCS_02, "arcs@02"), ("v", _CROSS, "cross")):
            (p0, q0), (p1, q1) = arcs
            tiles.append(Tile(symbol, ((p0, q0, first), (p1, q1, second)), f"{label}/{first}{second}"))
    return tuple(tiles)


TILES: dict[ModelId, tuple[Tile, ...]] = {
    ModelId.DENSE: _dense_tiles(),
    ModelId.DILUTE: _dilute_tiles(),
    ModelId.C2: _c2_tiles(),
}


@dataclass(frozen=True)
class WeightSet:
    """Boltzmann weights of one model plus the loop fugacity."""

    model: ModelId
    weights: Mapping[str, float]
    fugacity: float
    notes: tuple[str, ...] = field(default=(), compare=False)

    def __post_init__(self) -> None:
        model = ModelId.parse(self.model)
        object.__setattr__(self, "model", model)
        missing = set(SYMBOLS[model]) - set(self.weights)
        extra = set(self.weights) - set(SYMBOLS[model])
        if missing or extra:
            raise ValueError(f"{model.value} weights need {SYMBOLS[model]}, got {sorted(self.weights)}")
        object.__setattr__(self, "weights", {k: float(self.weights[k]) for k in SYMBOLS[model]})

    def __getitem__(self, symbol: str) -> float:
        return self.weights[symbol]

    def vector(self) -> np.ndarray:
        return np.array([self.weights[k] for k in SYMBOLS[self.model]])

    @classmethod
    def from_vector(cls, model: "ModelId | str", vector, fugacity: float) -> "WeightSet":
        model = ModelId.parse(model)
        return cls(model, dict(zip(SYMBOLS[model], map(float, vector))), float(fugacity))

    def scaled(self, factor: float) -> "WeightSet":
        return WeightSet.from_vector(self.model, factor * self.vector(), self.fugacity)

    def perturbed(self, rel: float, rng: np.random.Generator) -> "WeightSet":
        """Multiply every weight by an independent ``1 +- rel`` factor.

        If every draw has the same sign the last one is flipped, since a
        common factor is only a change of normalisation.
        """
        signs = rng.choice([-1.0, 1.0], size=len(SYMBOLS[self.model]))
        if np.all(signs == signs[0]):
            signs[-1] = -signs[0]
        return WeightSet.from_vector(self.model, self.vector() * (1 + rel * signs), self.fugacity)

    def to_dict(self) -> dict:
        return {"model": self.model.value, "weights": dict(self.weights), "fugacity": self.fugacity}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, data: Mapping) -> "WeightSet":
        return cls(ModelId.parse(data["model"]), dict(data["weights"]), float(data["fugacity"]))


class DegenerateCouplingError(ValueError):
    """A Potts coupling with exp(J) = 1 sends a weight ratio to 0 or infinity."""


def potts_loop_weights(J1: float, J2: float, Q: float) -> tuple[float, float]:
    """Loop-model weight ratios ``(b1/a1, b2/a2)`` of the anisotropic Potts model."""
    if Q <= 0:
        raise ValueError("Q must be positive")
    x1, x2 = math.expm1(J1), math.expm1(J2)
    if x1 == 0.0 or x2 == 0.0:
        raise DegenerateCouplingError(f"exp(J) = 1 for J1={J1}, J2={J2}")
    sq = math.sqrt(Q)
    return x1 / sq, sq / x2


def dense_weights(gamma: float, u: float) -> WeightSet:
    """Critical Temperley-Lieb weights ``a = sin u``, ``b = sin(gamma - u)``.

    The physical regime is ``0 < u < gamma``; any real ``u`` is accepted.
    """
    return WeightSet(
        ModelId.DENSE,
        {"a": math.sin(u), "b": math.sin(gamma - u)},
        2 * math.cos(gamma),
    )


def fugacity_from_eta(eta: float) -> float:
    return -2 * math.cos(2 * eta)


def on_integrable_weights(eta: float, phi: float, *, printed: bool = False) -> WeightSet:
    """Integrable dilute O(n) weights on the branch ``s = 3 eta / (2 pi) - 1/2``.

    The default form is the null vector of the local holomorphicity system
    (and satisfies Yang-Baxter). ``printed=True`` returns the form commonly
    quoted in the literature, which differs by the sign of the
    ``sin(eta/2)`` term in ``t`` and the overall sign of ``w2``; it does not
    solve the holomorphicity equations and is kept for comparison only.
    """
    c = math.cos(1.5 * eta - phi)
    sin_e = math.sin(eta)
    sign = 1.0 if printed else -1.0
    w = {
        "t": -math.sin(2 * phi - 1.5 * eta) + math.sin(2.5 * eta) - math.sin(1.5 * eta) + sign * math.sin(0.5 * eta),
        "u1": -2 * sin_e * c,
        "u2": -2 * sin_e * math.sin(phi),
        "v": -2 * math.sin(phi) * c,
        "w1": -2 * math.sin(phi - eta) * c,
        "w2": sign * 2 * math.cos(0.5 * eta - phi) * math.sin(phi),
    }
    return WeightSet(ModelId.DILUTE, w, fugacity_from_eta(eta))


def on_v0_n1_weights(s: float, phi: float, w1: float | None = None) -> WeightSet:
    """The ``n = 1``, ``v = 0`` solution, valid for every spin.

    Only ``w1 + w2 = sin(pi s)`` is fixed; ``w1`` defaults to half of it.
    """
    total = math.sin(math.pi * s)
    if w1 is None:
        w1 = total / 2
    w = {
        "t": total,
        "u1": math.sin(phi - math.pi * s),
        "u2": math.sin(phi),
        "v": 0.0,
        "w1": w1,
        "w2": total - w1,
    }
    return WeightSet(ModelId.DILUTE, w, 1.0)


def on_v0_dense_weights(u1: float, u2: float, n: float = 1.0) -> WeightSet:
    """The ``v = 0``, ``s = -1`` solution ``t = -u1 - u2, w1 = -u1, w2 = -u2``.

    Flipping the signs of ``u1, u2`` maps it onto the dense model with
    ``sqrt(Q) = n + 1``, ``a = u1``, ``b = u2``. The lattice observable is
    antiholomorphic but this is not a candidate continuum field.
    """
    w = {"t": -u1 - u2, "u1": u1, "u2": u2, "v": 0.0, "w1": -u1, "w2": -u2}
    return WeightSet(ModelId.DILUTE, w, n, notes=("s=-1 branch; not a continuum antiholomorphic field",))


def c2_integrable_weights(eta: float, phi: float, *, printed: bool = False) -> WeightSet:
    """Integrable two-colour weights on the branch ``s = (3 eta - pi) / (2 pi)``.

    The default form solves the local holomorphicity system. ``printed=True``
    flips the sign of ``u1`` and ``u2``, giving the form commonly quoted in
    the literature. The flip is the same as shifting ``phi`` by ``pi``. It
    leaves the partition function unchanged (the number of ``u`` tiles is
    even under fixed boundary colours) but not the observable, whose colour
    changes alter that parity, and it moves the Yang-Baxter middle argument
    from ``phi1 + phi2 - pi`` to ``phi1 + phi2``.
    """
    s3 = math.sin(phi - 3 * eta)
    sp = math.sin(phi)
    sign = 1.0 if printed else -1.0
    w = {
        "u1": sign * math.sin(eta) * s3,
        "u2": -sign * math.sin(eta) * sp,
        "v": -sp * s3,
        "w1": -math.sin(phi - eta) * s3,
        "w2": -math.sin(phi - 2 * eta) * sp,
    }
    return WeightSet(ModelId.C2, w, fugacity_from_eta(eta))


def spin_value(model: "ModelId | str", angle: float) -> float:
    """Spin of the holomorphic parafermion.

    ``angle`` is ``gamma`` for the dense model (``sqrt(Q) = 2 cos gamma``)
    and ``eta`` for the other two (``n = -2 cos 2 eta``).
    """
    model = ModelId.parse(model)
    if model is ModelId.DENSE:
        return 1 - 2 * angle / math.pi
    if model is ModelId.DILUTE:
        return 1.5 * angle / math.pi - 0.5
    return (3 * angle - math.pi) / (2 * math.pi)


def six_vertex_map(s: float, phi: float) -> tuple[tuple[float, ...], float]:
    """Six-vertex weights and anisotropy of the ``n = 1, v = 0`` dilute model."""
    w12 = math.sin(phi - math.pi * s)
    w34 = math.sin(phi)
    w56 = math.sin(math.pi * s)
    return (w12, w12, w34, w34, w56, w56), math.cos(math.pi * s)
