"""Exact enumeration of loop configurations and the parafermionic observable.

A configuration is a choice of tile in every *cell* of a :class:`Network`.
Cells are the plaquettes of a rhombic domain plus two-slot boundary arcs
that close strands leaving the domain: consecutive boundary midpoints are
joined pairwise outside the domain, turning around their shared vertex.

Two slots facing each other across a midpoint must agree (both empty, or
the same colour). A mismatch is a *defect*; the observable of the dilute
model puts the ends of its open path on defects, the two-colour model puts
its colour changes there.
"""

from __future__ import annotations

import cmath
import math
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Callable, Iterator, Mapping

import numpy as np

from .geometry import Sweep, RhombicDomain, Turn, TurnDirection, contour_sum, slot_turn
from .models import TILES, ModelId, Tile, WeightSet

__all__ = [
    "EnumerationCapError",
    "CellTile",
    "Cell",
    "Network",
    "LoopConfiguration",
    "MarkedPoint",
    "ObservableField",
    "HoloReport",
    "PairCheck",
    "build_network",
    "enumerate_configurations",
    "partition_function",
    "default_origin",
    "boundary_origin",
    "interior_origin",
    "observable",
    "holo_residual_report",
    "pairwise_cancellation_check",
]

DEFAULT_CAP = 10**8


class EnumerationCapError(RuntimeError):
    pass


@dataclass(frozen=True)
class CellTile:
    """A tile placed in a specific cell.

    ``route[slot]`` is ``(other_slot, k_pi, k_beta, colour)`` for occupied
    slots: where the strand leaves and the winding picked up on the way.
    """

    symbol: str | None
    occupancy: tuple[int | None, ...]
    route: tuple[tuple[int, int, int, int] | None, ...]
    name: str = ""


@dataclass(frozen=True)
class Cell:
    slots: tuple[int, ...]
    tiles: tuple[CellTile, ...]
    label: str


@dataclass
class Network:
    cells: list[Cell]
    n_midpoints: int
    sides: list[list[tuple[int, int]]] = field(init=False)

    def __post_init__(self) -> None:
        self.sides = [[] for _ in range(self.n_midpoints)]
        for c, cell in enumerate(self.cells):
            for k, m in enumerate(cell.slots):
                self.sides[m].append((c, k))
        for m, s in enumerate(self.sides):
            if len(s) > 2:
                raise ValueError(f"midpoint {m} is shared by more than two cells")

    def other_side(self, m: int, cell: int) -> tuple[int, int] | None:
        for side in self.sides[m]:
            if side[0] != cell:
                return side
        return None


def _cell_tile(symbol: str | None, strands, turn_of: Callable[[int, int], Turn], n_slots: int, name: str = "") -> CellTile:
    occ: list[int | None] = [None] * n_slots
    route: list[tuple[int, int, int, int] | None] = [None] * n_slots
    for a, b, colour in strands:
        kp, kb = turn_of(a, b).coefficients()
        occ[a] = occ[b] = colour
        route[a] = (b, kp, kb, colour)
        route[b] = (a, -kp, -kb, colour)
    return CellTile(symbol, tuple(occ), tuple(route), name)


def plaquette_tiles(model: ModelId) -> tuple[CellTile, ...]:
    return tuple(_cell_tile(t.symbol, t.strands, slot_turn, 4, t.name) for t in TILES[model])


def arc_tiles(model: ModelId, sweep: Sweep) -> tuple[CellTile, ...]:
    def turn_of(a: int, b: int) -> Turn:
        # slot 0 -> slot 1 follows the boundary counter-clockwise
        return Turn(TurnDirection.LEFT if (a, b) == (0, 1) else TurnDirection.RIGHT, sweep)

    arcs = [_cell_tile(None, ((0, 1, 0),), turn_of, 2, "arc")]
    if model is ModelId.DILUTE:
        arcs.append(_cell_tile(None, (), turn_of, 2, "empty"))
    elif model is ModelId.C2:
        arcs.append(_cell_tile(None, ((0, 1, 1),), turn_of, 2, "arc/1"))
    return tuple(arcs)


def build_network(domain: RhombicDomain, model: "ModelId | str", boundary: str = "reflecting") -> Network:
    """Cells for every plaquette of ``domain`` plus the boundary arcs.

    ``boundary`` is ``"reflecting"`` (arcs join boundary midpoints 0-1, 2-3,
    ... counted counter-clockwise from the lower-left corner),
    ``"reflecting-shifted"`` (pairs 1-2, 3-4, ..., wrapping around) or, for
    the dilute model only, ``"empty"`` (no strand leaves the domain).
    """
    model = ModelId.parse(model)
    offsets = {"reflecting": 0, "reflecting-shifted": 1, "empty": 0}
    if boundary not in offsets:
        raise ValueError(f"unknown boundary rule {boundary!r}")
    if boundary == "empty" and model is not ModelId.DILUTE:
        raise ValueError("only the dilute model admits an empty boundary")
    tiles = plaquette_tiles(model)
    cells = [Cell(tuple(slots), tiles, f"P{p}") for p, slots in enumerate(domain.plaquettes)]
    L = len(domain.boundary)
    for m in range(offsets[boundary], L + offsets[boundary], 2):
        a, b = domain.boundary[m % L], domain.boundary[(m + 1) % L]
        arcs = arc_tiles(model, domain.boundary_corners[m % L])
        if boundary == "empty":
            arcs = tuple(t for t in arcs if t.name == "empty")
        cells.append(Cell((a, b), arcs, f"B{m % L}"))
    return Network(cells, len(domain.edges))


@dataclass(frozen=True)
class LoopConfiguration:
    """One edge-consistent (up to allowed defects) tile assignment."""

    tiles: tuple[int, ...]
    weight: float
    closed_loops: tuple[tuple[int, ...], ...]
    loop_colours: tuple[int, ...]
    open_paths: tuple[tuple[int, ...], ...]
    defects: tuple[int, ...]

    @property
    def n_closed(self) -> int:
        return len(self.closed_loops)


def _walk(net: Network, choice, cell: int, slot: int):
    """Follow a strand entering ``cell`` through ``slot``.

    Yields ``(midpoint, k_pi, k_beta, cell, slot_out)`` after each cell,
    where the winding is cumulative; stops at an end or before re-entering
    the starting side.
    """
    start = (cell, slot)
    kp = kb = 0
    while True:
        tile = net.cells[cell].tiles[choice[cell]]
        out, dkp, dkb, _ = tile.route[slot]
        kp += dkp
        kb += dkb
        m = net.cells[cell].slots[out]
        yield m, kp, kb, cell, out
        nxt = net.other_side(m, cell)
        if nxt is None:
            return
        c2, k2 = nxt
        if net.cells[c2].tiles[choice[c2]].occupancy[k2] is None:
            return
        if (c2, k2) == start:
            return
        cell, slot = c2, k2


def _trace_all(net: Network, choice, defect_set: set[int]):
    """Decompose an assignment into open strands and closed loops.

    A loop through a defect (two-colour observable) is returned with the
    open strands: it carries no fugacity.
    """
    visited: set[tuple[int, int]] = set()
    opens: list[tuple[int, ...]] = []
    closed: list[tuple[int, ...]] = []
    colours: list[int] = []

    def occupied(side) -> bool:
        return side is not None and net.cells[side[0]].tiles[choice[side[0]]].occupancy[side[1]] is not None

    def follow(c: int, k: int) -> list[int]:
        visited.add((c, k))
        seen = []
        for m2, _, _, c2, k2 in _walk(net, choice, c, k):
            seen.append(m2)
            visited.add((c2, k2))
            nxt = net.other_side(m2, c2)
            if occupied(nxt):
                visited.add(nxt)
        return seen

    # open strands start where the facing slot is empty or missing
    for c, cell in enumerate(net.cells):
        tile = cell.tiles[choice[c]]
        for k, m in enumerate(cell.slots):
            if tile.occupancy[k] is None or (c, k) in visited:
                continue
            if occupied(net.other_side(m, c)):
                continue
            opens.append((m, *follow(c, k)))
    for c, cell in enumerate(net.cells):
        tile = cell.tiles[choice[c]]
        for k, m in enumerate(cell.slots):
            if tile.occupancy[k] is None or (c, k) in visited:
                continue
            loop = tuple(follow(c, k))
            if defect_set.intersection(loop):
                opens.append(loop)
            else:
                closed.append(loop)
                colours.append(tile.occupancy[k])
    return opens, closed, colours


def enumerate_configurations(
    net: Network,
    weights: Mapping[str, float],
    fugacity: float,
    *,
    origin: "MarkedPoint | None" = None,
    max_extra_defects: int = 0,
    cap: int = DEFAULT_CAP,
    skip_zero: bool = True,
) -> Iterator[LoopConfiguration]:
    """Yield every tile assignment whose only mismatches are allowed defects.

    With ``origin`` given, the origin midpoint may carry its marked defect
    (occupied towards ``origin.into``, empty or recoloured on the other
    side); at most ``max_extra_defects`` further midpoints may mismatch.
    Tiles of zero weight are skipped unless ``skip_zero`` is False.
    """
    n_cells = len(net.cells)
    size = 1
    for cell in net.cells:
        size *= len(cell.tiles)
    if size > cap:
        raise EnumerationCapError(f"{size} tile assignments exceed the cap {cap}")

    def tile_weight(t: CellTile) -> float:
        return 1.0 if t.symbol is None else float(weights[t.symbol])

    options = [
        [i for i, t in enumerate(cell.tiles) if not (skip_zero and tile_weight(t) == 0.0)]
        for cell in net.cells
    ]
    # slots to check when a cell is assigned: partner already placed
    checks: list[list[tuple[int, int, int]]] = []
    for c, cell in enumerate(net.cells):
        lst = []
        for k, m in enumerate(cell.slots):
            other = net.other_side(m, c)
            if other is not None and other[0] < c:
                lst.append((k, m, other[0], other[1]))
        checks.append(lst)

    origin_mid = origin.edge if origin is not None else -1
    choice = [0] * n_cells

    def origin_ok(c: int, k: int, c2: int, k2: int) -> bool | None:
        """True: marked defect, False: consistent, None: forbidden."""
        occ_here = net.cells[c].tiles[choice[c]].occupancy[k]
        occ_there = net.cells[c2].tiles[choice[c2]].occupancy[k2]
        if occ_here == occ_there:
            return False
        by_cell = {c: occ_here, c2: occ_there}
        if by_cell[origin.into] == 0 and by_cell[origin.away] == origin.away_state:
            return True
        return None

    def rec(c: int, defects: list[int]):
        if c == n_cells:
            yield list(defects)
            return
        for opt in options[c]:
            choice[c] = opt
            tile = net.cells[c].tiles[opt]
            new = []
            ok = True
            for k, m, c2, k2 in checks[c]:
                if m == origin_mid:
                    state = origin_ok(c, k, c2, k2)
                    if state is None:
                        ok = False
                        break
                    if state:
                        new.append(m)
                    continue
                if tile.occupancy[k] != net.cells[c2].tiles[choice[c2]].occupancy[k2]:
                    new.append(m)
            if not ok:
                continue
            extra = sum(1 for m in defects + new if m != origin_mid)
            if extra > max_extra_defects:
                continue
            yield from rec(c + 1, defects + new)

    for defects in rec(0, []):
        dset = set(defects)
        opens, closed, colours = _trace_all(net, choice, dset)
        w = 1.0
        for c in range(n_cells):
            w *= tile_weight(net.cells[c].tiles[choice[c]])
        w *= fugacity ** len(closed)
        yield LoopConfiguration(tuple(choice), w, tuple(closed), tuple(colours), tuple(opens), tuple(sorted(dset)))


def partition_function(
    domain: RhombicDomain, weights: WeightSet, boundary: str = "reflecting", cap: int = DEFAULT_CAP
) -> float:
    net = build_network(domain, weights.model, boundary)
    return math.fsum(cfg.weight for cfg in enumerate_configurations(net, weights.weights, weights.fugacity, cap=cap))


@dataclass(frozen=True)
class MarkedPoint:
    """The point 0: an edge plus the cell the strand leaves into.

    ``into`` and ``away`` are cell indices of the network; plaquette cells
    come first, so for an interior edge they are plaquette indices. For a
    boundary edge ``away`` is the boundary-arc cell outside it.

    ``away_state`` is what the other side must show in the defect-based
    observables: empty for the dilute model, colour 1 for the two-colour one.
    """

    edge: int
    into: int
    away: int
    away_state: int | None = None

    def direction(self, domain: RhombicDomain) -> complex:
        """Unit normal of the origin edge pointing into ``into``."""
        i, j = domain.edges[self.edge]
        t = domain.vertices[j] - domain.vertices[i]
        n = complex(-t.imag, t.real) / abs(t)
        centre = np.mean([domain.midpoints[e] for e in domain.plaquettes[self.into]])
        mid = domain.midpoints[self.edge]
        return n if ((centre - mid) * n.conjugate()).real > 0 else -n


def interior_origin(domain: RhombicDomain, model: "ModelId | str", flip: bool = False) -> MarkedPoint:
    """Interior horizontal edge nearest the centre, strand pointing up (down if ``flip``).

    With the origin in the bulk a strand can encircle it, which shifts the
    winding to a plaquette by a multiple of 2 pi. The observable is then
    holomorphic only at spins where that shift is invisible (``s = 1/2``
    for the dense model).
    """
    model = ModelId.parse(model)
    if domain.rows < 2 and domain.cols < 2:
        raise ValueError("a 1x1 domain has no interior edge for the origin")
    if domain.rows >= 2:
        k, j = domain.rows // 2, (domain.cols - 1) // 2
        edge = domain.horizontal_edge(k, j)
        below, above = domain.plaquette_index(k - 1, j), domain.plaquette_index(k, j)
    else:
        k, j = 0, domain.cols // 2
        edge = domain.slanted_edge(k, j)
        below, above = domain.plaquette_index(0, j - 1), domain.plaquette_index(0, j)
    into, away = (below, above) if flip else (above, below)
    state = 1 if model is ModelId.C2 else None
    return MarkedPoint(edge, into, away, state)


def boundary_origin(
    domain: RhombicDomain, model: "ModelId | str", position: int = 0, boundary: str = "reflecting"
) -> MarkedPoint:
    """Origin on the boundary edge ``domain.boundary[position]``, strand pointing inwards.

    Path observables need the origin on the boundary: an external strand
    cannot then wind around it, so the local cancellation holds on every
    plaquette not carrying the origin.
    """
    model = ModelId.parse(model)
    net = build_network(domain, model, boundary)
    edge = domain.boundary[position]
    (c1, _), (c2, _) = net.sides[edge]
    into, away = (c1, c2) if c1 < len(domain.plaquettes) else (c2, c1)
    state = 1 if model is ModelId.C2 else None
    return MarkedPoint(edge, into, away, state)


def default_origin(domain: RhombicDomain, model: "ModelId | str", boundary: str = "reflecting") -> MarkedPoint:
    """The first boundary midpoint (bottom edge of the lower-left plaquette)."""
    return boundary_origin(domain, model, 0, boundary)


class ObservableField(Mapping):
    """Values of ``F_s`` on edge midpoints, keyed by edge id."""

    def __init__(self, values: dict[int, complex], s: float, origin: MarkedPoint, partition: float, multi_visits: int = 0):
        self.values = values
        self.s = s
        self.origin = origin
        self.partition = partition
        self.multi_visits = multi_visits

    def __getitem__(self, key: int) -> complex:
        return self.values[key]

    def __iter__(self):
        return iter(self.values)

    def __len__(self) -> int:
        return len(self.values)


def observable(
    domain: RhombicDomain,
    weights: WeightSet,
    s: float,
    origin: MarkedPoint | None = None,
    *,
    beta: float | None = None,
    boundary: str = "reflecting",
    cap: int = DEFAULT_CAP,
) -> ObservableField:
    """Compute ``F_s(z)`` on every midpoint by full enumeration.

    Dense model: configurations where ``z`` lies on the loop through 0,
    winding measured along the loop leaving 0 towards ``origin.into``.
    Dilute model: an open path from 0 to ``z``. Two-colour model: the loop
    through 0 and ``z`` changes colour at both; the phase uses the windings
    of both halves, each traced from 0 to ``z``.

    Raises:
        ZeroDivisionError: when the partition function vanishes.
    """
    model = weights.model
    if origin is None:
        origin = default_origin(domain, model, boundary)
    if beta is None:
        beta = domain.alpha
    net = build_network(domain, model, boundary)
    into_slot = net.cells[origin.into].slots.index(origin.edge)
    away_slot = net.cells[origin.away].slots.index(origin.edge)

    def phase(kp: int, kb: int) -> complex:
        return cmath.exp(-1j * s * (kp * math.pi + kb * beta))

    num: dict[int, complex] = defaultdict(complex)
    Z = 0.0
    multi = 0
    if model is ModelId.DENSE:
        for cfg in enumerate_configurations(net, weights.weights, weights.fugacity, cap=cap):
            Z += cfg.weight
            num[origin.edge] += cfg.weight
            choice = cfg.tiles
            for m, kp, kb, _, _ in _walk(net, choice, origin.into, into_slot):
                if m != origin.edge:
                    num[m] += cfg.weight * phase(kp, kb)
    else:
        configs = enumerate_configurations(
            net, weights.weights, weights.fugacity, origin=origin, max_extra_defects=1, cap=cap
        )
        for cfg in configs:
            choice = cfg.tiles
            if not cfg.defects:
                Z += cfg.weight
                occ = net.cells[origin.into].tiles[choice[origin.into]].occupancy[into_slot]
                if occ == origin.away_state:
                    num[origin.edge] += cfg.weight
                continue
            if origin.edge not in cfg.defects or len(cfg.defects) != 2:
                continue
            z = cfg.defects[0] if cfg.defects[1] == origin.edge else cfg.defects[1]
            kp, kb, hits = _wind_to(net, choice, origin.into, into_slot, z)
            if model is ModelId.C2:
                kp2, kb2, hits2 = _wind_to(net, choice, origin.away, away_slot, z)
                kp, kb = kp + kp2, kb + kb2
                hits = hits and hits2
            if not hits:
                multi += 1
                continue
            num[z] += cfg.weight * phase(kp, kb)
    if Z == 0.0:
        raise ZeroDivisionError("partition function vanishes")
    values = {e: num.get(e, 0j) / Z for e in range(len(domain.edges))}
    return ObservableField(values, s, origin, Z, multi)


def _wind_to(net: Network, choice, cell: int, slot: int, target: int) -> tuple[int, int, bool]:
    for m, kp, kb, _, _ in _walk(net, choice, cell, slot):
        if m == target:
            return kp, kb, True
    return 0, 0, False


@dataclass(frozen=True)
class HoloReport:
    residuals: dict[int, complex]
    interior: tuple[int, ...]
    origin_adjacent: tuple[int, ...]
    partition_function: float

    @property
    def interior_max(self) -> float:
        return max((abs(self.residuals[p]) for p in self.interior), default=0.0)

    @property
    def origin_adjacent_max(self) -> float:
        return max((abs(self.residuals[p]) for p in self.origin_adjacent), default=0.0)


def holo_residual_report(field: ObservableField, domain: RhombicDomain) -> HoloReport:
    """Contour sums on every plaquette, split into interior and origin-adjacent."""
    residuals = {p: contour_sum(field, p, domain) for p in range(len(domain.plaquettes))}
    adjacent = tuple(p for p, slots in enumerate(domain.plaquettes) if field.origin.edge in slots)
    interior = tuple(p for p in residuals if p not in adjacent)
    return HoloReport(residuals, interior, adjacent, field.partition)


@dataclass(frozen=True)
class PairCheck:
    """Outcome of pairing configurations that differ only on one plaquette."""

    pairs: int
    case1: int
    case2: int
    ratio_max_error: float
    cancellation_max: float


def pairwise_cancellation_check(
    domain: RhombicDomain,
    plaquette: int,
    weights: WeightSet,
    s: float,
    origin: MarkedPoint | None = None,
    *,
    boundary: str = "reflecting",
) -> PairCheck:
    """Check the two-configuration cancellation on a dense-model plaquette.

    Configurations ``G`` (tile ``a`` on the plaquette) and ``G'`` (tile
    ``b``) share everything else. In case 1 ``G`` has one more closed loop,
    so ``W(G') * a * sqrtQ = W(G) * b``; in case 2 ``G'`` has one more, so
    ``W(G') * a = W(G) * b * sqrtQ``. Their contributions to the contour sum
    of the plaquette must cancel.
    """
    if weights.model is not ModelId.DENSE:
        raise ValueError("pairwise cancellation is a dense-model check")
    if origin is None:
        origin = default_origin(domain, ModelId.DENSE, boundary)
    if origin.edge in domain.plaquettes[plaquette]:
        raise ValueError("plaquette carries the origin")
    net = build_network(domain, ModelId.DENSE, boundary)
    a_idx = next(i for i, t in enumerate(net.cells[plaquette].tiles) if t.symbol == "a")
    into_slot = domain.plaquettes[origin.into].index(origin.edge)
    beta = domain.alpha
    sq = weights.fugacity
    a, b = weights["a"], weights["b"]
    P_edges = domain.plaquettes[plaquette]
    P_signs = domain.orientation[plaquette]

    groups: dict[tuple, dict[str, tuple[float, complex, int]]] = {}
    Z = 0.0
    for cfg in enumerate_configurations(net, weights.weights, weights.fugacity, skip_zero=False):
        Z += cfg.weight
        contrib = 0j
        for m, kp, kb, _, _ in _walk(net, cfg.tiles, origin.into, into_slot):
            if m in P_edges:
                k = P_edges.index(m)
                dz = P_signs[k] * domain.edge_vector(m)
                contrib += cfg.weight * cmath.exp(-1j * s * (kp * math.pi + kb * beta)) * dz
        key = cfg.tiles[:plaquette] + cfg.tiles[plaquette + 1 :]
        which = "a" if cfg.tiles[plaquette] == a_idx else "b"
        groups.setdefault(key, {})[which] = (cfg.weight, contrib, cfg.n_closed)

    pairs = case1 = case2 = 0
    ratio_err = 0.0
    cancel = 0.0
    for g in groups.values():
        wG, cG, nG = g["a"]
        wH, cH, nH = g["b"]
        if cG == 0 and cH == 0:
            continue
        pairs += 1
        if nG == nH + 1:
            case1 += 1
            ratio_err = max(ratio_err, abs(wH * a * sq - wG * b) / max(abs(wG * b), 1e-300))
        elif nH == nG + 1:
            case2 += 1
            ratio_err = max(ratio_err, abs(wH * a - wG * b * sq) / max(abs(wG * b * sq), 1e-300))
        else:
            ratio_err = math.inf
        cancel = max(cancel, abs(cG + cH) / Z)
    return PairCheck(pairs, case1, case2, ratio_err, cancel)
