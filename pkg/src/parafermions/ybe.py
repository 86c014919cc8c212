"""Yang-Baxter checks, algebraic and diagrammatic.

The dense model is checked in the three-strand Temperley-Lieb algebra. All
models are also checked diagrammatically: each side of the equation is a
stack of three rhombi acting on three strand positions (the two
triangulations of a hexagon), and the sums of configuration weights are
compared class by class, a class being the occupation, colouring and
pairing of the six external midpoints.

A stacked rhombus is read as a diamond with corners S, E, N, W equal to
plaquette corners 0, 1, 2, 3. Its lower-left and lower-right sides (slots 3
and 0) are the incoming positions ``i`` and ``i + 1``; slots 2 and 1 are the
outgoing ones. The tile joining 3-2 and 0-1 (arcs around corners 1 and 3)
is then the identity, and the one joining 3-0 and 1-2 is the Temperley-Lieb
generator.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from typing import Callable, Mapping, Sequence

import numpy as np

from .enumeration import Cell, Network, enumerate_configurations, plaquette_tiles
from .models import ModelId, WeightSet, c2_integrable_weights, on_integrable_weights

__all__ = [
    "TLWord",
    "rmatrix",
    "tl_ybe_residual",
    "ConnectivityClass",
    "ClassResidual",
    "DiagramReport",
    "stack_network",
    "class_weights",
    "diagram_ybe_residual",
    "Convention",
    "CONVENTIONS",
    "ConventionResult",
    "convention_weights",
    "scan_conventions",
]


# ------------------------------------------------------------ Temperley-Lieb

_BASIS: tuple[tuple[int, ...], ...] = ((), (1,), (2,), (1, 2), (2, 1))
_BASIS_NAMES = {(): "1", (1,): "E1", (2,): "E2", (1, 2): "E1E2", (2, 1): "E2E1"}


def _reduce(word: tuple[int, ...]) -> tuple[int, tuple[int, ...]]:
    """Reduce a generator word; returns (power of the loop weight, basis word)."""
    loops = 0
    w = list(word)
    changed = True
    while changed:
        changed = False
        for i in range(len(w) - 1):
            if w[i] == w[i + 1]:
                del w[i + 1]
                loops += 1
                changed = True
                break
        if changed:
            continue
        for i in range(len(w) - 2):
            if w[i] == w[i + 2] != w[i + 1]:
                del w[i + 1 : i + 3]
                changed = True
                break
    return loops, tuple(w)


@dataclass(frozen=True)
class TLWord:
    """Linear combination of the basis ``1, E1, E2, E1E2, E2E1``.

    Attributes:
        q: loop weight, ``E_i E_i = q E_i``.
        coeffs: coefficient of each basis word, keyed by generator tuples.
    """

    q: float
    coeffs: Mapping[tuple[int, ...], float]

    @classmethod
    def identity(cls, q: float) -> "TLWord":
        return cls(q, {(): 1.0})

    @classmethod
    def generator(cls, q: float, i: int) -> "TLWord":
        if i not in (1, 2):
            raise ValueError("three strands have generators E1 and E2 only")
        return cls(q, {(i,): 1.0})

    def __add__(self, other: "TLWord") -> "TLWord":
        out = dict(self.coeffs)
        for k, c in other.coeffs.items():
            out[k] = out.get(k, 0.0) + c
        return TLWord(self.q, out)

    def __sub__(self, other: "TLWord") -> "TLWord":
        return self + other.scale(-1.0)

    def scale(self, c: float) -> "TLWord":
        return TLWord(self.q, {k: c * v for k, v in self.coeffs.items()})

    def __mul__(self, other: "TLWord") -> "TLWord":
        out: dict[tuple[int, ...], float] = {}
        for k1, c1 in self.coeffs.items():
            for k2, c2 in other.coeffs.items():
                loops, word = _reduce(k1 + k2)
                out[word] = out.get(word, 0.0) + c1 * c2 * self.q**loops
        return TLWord(self.q, out)

    def vector(self) -> np.ndarray:
        return np.array([self.coeffs.get(b, 0.0) for b in _BASIS])

    def to_dict(self) -> dict[str, float]:
        return {_BASIS_NAMES[b]: float(self.coeffs.get(b, 0.0)) for b in _BASIS}


def rmatrix(gamma: float, u: float, i: int, b_shift: float = 0.0) -> TLWord:
    """``R_{i,i+1}(u) = sin(u) 1 + (sin(gamma - u) + b_shift) E_i`` with loop weight ``2 cos gamma``."""
    q = 2 * math.cos(gamma)
    return TLWord.identity(q).scale(math.sin(u)) + TLWord.generator(q, i).scale(math.sin(gamma - u) + b_shift)


def tl_ybe_residual(gamma: float, u: float, v: float, *, form: str = "valid", b_shift: float = 0.0) -> float:
    """Max coefficient difference of ``R12(u) R23(w) R12(v) - R23(v) R12(w) R23(u)``.

    Args:
        gamma: crossing parameter, loop weight ``2 cos gamma``.
        u, v: spectral parameters of the outer factors.
        form: ``"valid"`` uses ``w = u + v - gamma``, the middle argument for
            which ``a = sin u`` multiplies the identity; ``"difference"``
            uses ``w = v - u``, which does not satisfy the relation for
            these weights.
        b_shift: constant added to ``b``, for falsifiability checks.
    """
    if form == "valid":
        w = u + v - gamma
    elif form == "difference":
        w = v - u
    else:
        raise ValueError(f"unknown form {form!r}")

    def R(x: float, i: int) -> TLWord:
        return rmatrix(gamma, x, i, b_shift)

    lhs = R(u, 1) * R(w, 2) * R(v, 1)
    rhs = R(v, 2) * R(w, 1) * R(u, 2)
    return float(np.max(np.abs((lhs - rhs).vector())))


# ------------------------------------------------------------- diagrammatic


@dataclass(frozen=True, order=True)
class ConnectivityClass:
    """External state of a three-rhombus assembly.

    Attributes:
        occupation: colour on each external midpoint (bottom positions 1-3,
            then top positions 1-3), ``None`` if empty.
        pairing: sorted pairs of external midpoints joined by a strand.
    """

    occupation: tuple[int | None, ...]
    pairing: tuple[tuple[int, int], ...]

    def label(self) -> str:
        occ = "".join("." if c is None else str(c) for c in self.occupation)
        pairs = ",".join(f"{a}-{b}" for a, b in self.pairing)
        return f"{occ}|{pairs}"


@dataclass(frozen=True)
class ClassResidual:
    cls: ConnectivityClass
    lhs: float
    rhs: float

    @property
    def diff(self) -> float:
        return self.lhs - self.rhs

    def to_dict(self) -> dict:
        return {"pattern": self.cls.label(), "lhs": self.lhs, "rhs": self.rhs, "diff": self.diff}


@dataclass(frozen=True)
class DiagramReport:
    """Per-class comparison of the two sides.

    Attributes:
        classes: one entry per external class appearing on either side.
        scale: largest absolute class weight, for normalisation.
    """

    classes: tuple[ClassResidual, ...]
    scale: float

    @property
    def max_residual(self) -> float:
        return max((abs(c.diff) for c in self.classes), default=0.0)

    @property
    def relative_residual(self) -> float:
        return self.max_residual / self.scale if self.scale > 0 else 0.0


def stack_network(model: ModelId, positions: Sequence[int]) -> tuple[Network, tuple[int, ...]]:
    """Cells stacked bottom to top, cell ``k`` acting on positions ``(p_k, p_k + 1)``.

    Args:
        model: selects the tile catalogue.
        positions: ``1`` or ``2`` per cell, from the bottom.

    Returns:
        The network (tile symbols suffixed with ``#k`` for cell ``k``) and the
        six external midpoints: bottom positions 1-3, then top positions 1-3.
    """
    tiles = plaquette_tiles(model)
    current = [0, 1, 2]
    fresh = 3
    cells = []
    for k, p in enumerate(positions):
        if p not in (1, 2):
            raise ValueError("positions must be 1 or 2")
        left, right = current[p - 1], current[p]
        up_left, up_right = fresh, fresh + 1
        fresh += 2
        slots = (right, up_right, up_left, left)
        suffixed = tuple(dataclasses.replace(t, symbol=f"{t.symbol}#{k}") for t in tiles)
        cells.append(Cell(slots, suffixed, f"R{p}{p + 1}#{k}"))
        current[p - 1], current[p] = up_left, up_right
    return Network(cells, fresh), (0, 1, 2, *current)


def class_weights(
    model: ModelId, positions: Sequence[int], weight_sets: Sequence[WeightSet], fugacity: float
) -> dict[ConnectivityClass, float]:
    """Total weight per external class of a stack (closed loops weigh ``fugacity``)."""
    net, external = stack_network(model, positions)
    index = {m: i for i, m in enumerate(external)}
    weights = {f"{sym}#{k}": w for k, ws in enumerate(weight_sets) for sym, w in ws.weights.items()}
    side_of = {}
    for m in external:
        (c, k), = net.sides[m]
        side_of[m] = (c, k)
    out: dict[ConnectivityClass, float] = {}
    for cfg in enumerate_configurations(net, weights, fugacity, skip_zero=False):
        occ = []
        for m in external:
            c, k = side_of[m]
            occ.append(net.cells[c].tiles[cfg.tiles[c]].occupancy[k])
        pairs = tuple(sorted(tuple(sorted((index[p[0]], index[p[-1]]))) for p in cfg.open_paths))
        key = ConnectivityClass(tuple(occ), pairs)
        out[key] = out.get(key, 0.0) + cfg.weight
    return out


def diagram_ybe_residual(
    model: "ModelId | str", W1: WeightSet, W2: WeightSet, W3: WeightSet, *, fugacity: float | None = None
) -> DiagramReport:
    """Compare ``R12(W1) R23(W2) R12(W3)`` with ``R23(W3) R12(W2) R23(W1)`` class by class.

    Factors are listed bottom to top. Classes that cannot occur (for
    instance colour-inconsistent ones) have no configurations on either
    side and never appear.
    """
    model = ModelId.parse(model)
    for w in (W1, W2, W3):
        if w.model is not model:
            raise ValueError(f"weight set for {w.model.value} given to a {model.value} check")
    if fugacity is None:
        fugacity = W1.fugacity
    lhs = class_weights(model, (1, 2, 1), (W1, W2, W3), fugacity)
    rhs = class_weights(model, (2, 1, 2), (W3, W2, W1), fugacity)
    classes = tuple(
        ClassResidual(k, lhs.get(k, 0.0), rhs.get(k, 0.0)) for k in sorted(set(lhs) | set(rhs), key=_class_key)
    )
    scale = max((max(abs(c.lhs), abs(c.rhs)) for c in classes), default=0.0)
    return DiagramReport(classes, scale)


def _class_key(c: ConnectivityClass):
    return (tuple(-1 if o is None else o for o in c.occupation), c.pairing)


# ------------------------------------------------------ spectral conventions


@dataclass(frozen=True)
class Convention:
    """How the middle spectral argument is formed from the outer two.

    The outer weight sets are taken at ``phi1`` and ``phi2``. In the chosen
    variable ``x(phi)`` the middle one sits at ``x1 + x2`` (``"sum"``) or
    ``x2 - x1`` (``"difference"``).

    Attributes:
        name: identifier, ``"<combination>/<variable>"``.
        combination: ``"sum"`` or ``"difference"``.
        variable: ``"raw"`` (``x = phi``), ``"shifted"``
            (``x = phi - (pi + eta)/4``) or ``"complement"`` (``x = pi - phi``).
    """

    name: str
    combination: str
    variable: str

    def middle(self, eta: float, phi1: float, phi2: float) -> float:
        to_x, from_x = _VARIABLES[self.variable]
        x1, x2 = to_x(eta, phi1), to_x(eta, phi2)
        xm = x1 + x2 if self.combination == "sum" else x2 - x1
        return from_x(eta, xm)


_VARIABLES: dict[str, tuple[Callable[[float, float], float], Callable[[float, float], float]]] = {
    "raw": (lambda eta, p: p, lambda eta, x: x),
    "shifted": (lambda eta, p: p - (math.pi + eta) / 4, lambda eta, x: x + (math.pi + eta) / 4),
    "complement": (lambda eta, p: math.pi - p, lambda eta, x: math.pi - x),
}

CONVENTIONS: tuple[Convention, ...] = tuple(
    Convention(f"{comb}/{var}", comb, var) for var in ("raw", "shifted", "complement") for comb in ("sum", "difference")
)


def convention_weights(
    model: "ModelId | str", eta: float, phi1: float, phi2: float, convention: Convention, *, printed: bool = False
) -> tuple[WeightSet, WeightSet, WeightSet]:
    """The three weight sets ``(W1, W2, W3)`` of a convention, bottom to top on the left side."""
    model = ModelId.parse(model)
    family = {ModelId.DILUTE: on_integrable_weights, ModelId.C2: c2_integrable_weights}
    if model not in family:
        raise ValueError("spectral conventions are scanned for the dilute and two-colour families")
    fn = family[model]
    mid = convention.middle(eta, phi1, phi2)
    return fn(eta, phi1, printed=printed), fn(eta, mid, printed=printed), fn(eta, phi2, printed=printed)


@dataclass(frozen=True)
class ConventionResult:
    """Worst normalised residual of one convention over the samples."""

    convention: Convention
    max_residual: float
    samples: int

    def passes(self, tol: float) -> bool:
        return self.max_residual < tol

    def to_dict(self) -> dict:
        return {"convention": self.convention.name, "max_residual": self.max_residual, "samples": self.samples}


def scan_conventions(
    model: "ModelId | str",
    samples: Sequence[tuple[float, float, float]],
    *,
    conventions: Sequence[Convention] = CONVENTIONS,
    printed: bool = False,
) -> list[ConventionResult]:
    """Evaluate every convention on ``(eta, phi1, phi2)`` samples.

    The residual of a sample is the largest class difference divided by the
    largest class weight, so it does not depend on the normalisation of
    the weights.
    """
    out = []
    for conv in conventions:
        worst = 0.0
        for eta, p1, p2 in samples:
            W1, W2, W3 = convention_weights(model, eta, p1, p2, conv, printed=printed)
            worst = max(worst, diagram_ybe_residual(model, W1, W2, W3).relative_residual)
        out.append(ConventionResult(conv, worst, len(samples)))
    return out
