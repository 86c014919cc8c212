"""Local holomorphicity conditions as linear systems in the Boltzmann weights.

Requiring the contour sum of the observable to vanish around one plaquette,
configuration class by configuration class, gives a few complex linear
equations in the tile weights. This module builds them, evaluates their
determinants in closed form, extracts null vectors and scans the spin for
the values where a solution exists for every anisotropy angle.

Column order follows :data:`parafermions.models.SYMBOLS`. All closed-form
determinants agree with the numeric ones with normalisation constant 1
(see :data:`DETERMINANT_NORMALISATION`).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize

from .models import SYMBOLS, ModelId, WeightSet

__all__ = [
    "SpinParams",
    "HoloSystem",
    "SpinRoot",
    "ScanResult",
    "DegenerateFugacityError",
    "DETERMINANT_NORMALISATION",
    "build_potts_system",
    "potts_determinant",
    "potts_real_determinant",
    "potts_weight_ratio",
    "spectral_parameter",
    "isotropic_beta",
    "build_on_system",
    "on_dependency_residuals",
    "on_determinant",
    "build_c2_system",
    "c2_dependency_residual",
    "c2_determinant",
    "numeric_determinant",
    "null_space",
    "projection_cosine",
    "determinant_scan",
]

# closed form == K * numeric determinant, K fixed per (model, branch)
DETERMINANT_NORMALISATION: dict[str, float] = {
    "dense": 1.0,
    "dilute/v_nonzero": 1.0,
    "dilute/v_zero": 1.0,
    "c2": 1.0,
}


class DegenerateFugacityError(ValueError):
    """The reduced real system is not valid at this fugacity (``n**2 = 1``)."""


@dataclass(frozen=True)
class SpinParams:
    """Spin and embedding angles entering the holomorphicity equations.

    Attributes:
        model: which loop model the phases refer to.
        s: spin of the observable.
        alpha: shear angle of the rhombi.
        beta: angle used in the winding bookkeeping; defaults to ``alpha``.
    """

    model: ModelId
    s: float
    alpha: float
    beta: float | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "model", ModelId.parse(self.model))
        if self.beta is None:
            object.__setattr__(self, "beta", float(self.alpha))

    @property
    def spin_factor(self) -> int:
        """2 for the two-colour model, whose phases carry ``2 s``, else 1."""
        return 2 if self.model is ModelId.C2 else 1

    @property
    def lam(self) -> complex:
        return cmath.exp(1j * math.pi * self.spin_factor * self.s)

    @property
    def phi(self) -> float:
        """``alpha + k beta s`` with ``k`` the spin factor; ``(k s + 1) alpha`` at ``beta = alpha``."""
        return self.alpha + self.spin_factor * self.beta * self.s

    @property
    def mu(self) -> complex:
        return cmath.exp(1j * self.phi)


@dataclass(frozen=True)
class HoloSystem:
    """Complex holomorphicity equations and their reduced real form.

    Attributes:
        model: loop model.
        params: spin parameters used for the coefficients.
        fugacity: ``sqrt(Q)`` for the dense model, ``n`` otherwise.
        complex_rows: ``(equations, unknowns)`` complex coefficients.
        unknowns: weight symbols, one per column of ``complex_rows``.
        labels: one name per complex equation.
        selection: ``(equation, "re" | "im")`` rows kept in :attr:`matrix`.
        columns: indices of the unknowns kept in :attr:`matrix`.
        notes: caveats, e.g. an invalid reduction.
    """

    model: ModelId
    params: SpinParams
    fugacity: float
    complex_rows: np.ndarray
    unknowns: tuple[str, ...]
    labels: tuple[str, ...]
    selection: tuple[tuple[int, str], ...]
    columns: tuple[int, ...]
    notes: tuple[str, ...] = field(default=())

    @property
    def real_rows(self) -> np.ndarray:
        """All real rows, ``Re`` and ``Im`` of each equation in turn."""
        out = []
        for row in self.complex_rows:
            out += [row.real, row.imag]
        return np.array(out)

    @property
    def real_labels(self) -> tuple[str, ...]:
        return tuple(f"{part} {lab}" for lab in self.labels for part in ("Re", "Im"))

    @property
    def matrix(self) -> np.ndarray:
        """The selected real system, restricted to :attr:`columns`."""
        rows = [getattr(self.complex_rows[i], "real" if part == "re" else "imag") for i, part in self.selection]
        return np.array(rows)[:, list(self.columns)]

    @property
    def selected_labels(self) -> tuple[str, ...]:
        return tuple(f"{part.capitalize()} {self.labels[i]}" for i, part in self.selection)

    @property
    def selected_unknowns(self) -> tuple[str, ...]:
        return tuple(self.unknowns[c] for c in self.columns)

    def residuals(self, weights: WeightSet | np.ndarray) -> np.ndarray:
        """Complex value of every equation on a weight vector over :attr:`unknowns`."""
        if isinstance(weights, WeightSet):
            vec = np.array([weights[k] for k in self.unknowns])
        else:
            vec = np.asarray(weights, dtype=float)
        return self.complex_rows @ vec


def _params(model: ModelId, params: SpinParams) -> SpinParams:
    if params.model is not model:
        return SpinParams(model, params.s, params.alpha, params.beta)
    return params


# ---------------------------------------------------------------- dense model


def build_potts_system(Q: float, params: SpinParams) -> HoloSystem:
    """The two complex equations in ``(a, b)`` as a 4x2 real system.

    Args:
        Q: Potts state number, ``sqrt(Q)`` is the loop fugacity.
        params: spin and angles; ``mu = exp(i (alpha + beta s))``.
    """
    if Q < 0:
        raise ValueError(f"Q must be non-negative, got {Q}")
    p = _params(ModelId.DENSE, params)
    lam, mu, q = p.lam, p.mu, math.sqrt(Q)
    rows = np.array(
        [
            [(1 + mu) * q, 1 + mu - lam - mu / lam],
            [1 + mu - 1 / lam - mu / lam, (1 - mu / lam) * q],
        ]
    )
    selection = ((0, "re"), (0, "im"), (1, "re"), (1, "im"))
    return HoloSystem(ModelId.DENSE, p, q, rows, SYMBOLS[ModelId.DENSE], ("eq1", "eq2"), selection, (0, 1))


def potts_determinant(Q: float, params: SpinParams) -> complex:
    """Closed-form determinant ``(1+mu)(1-mu/lam)(lam^2+(Q-2)lam+1)/lam`` of the complex 2x2 system."""
    p = _params(ModelId.DENSE, params)
    lam, mu = p.lam, p.mu
    return (1 + mu) * (1 - mu / lam) * (lam * lam + (Q - 2) * lam + 1) / lam


def potts_real_determinant(Q: float, params: SpinParams) -> float:
    """The determinant rotated onto the real axis.

    ``i exp(-i (phi - pi s / 2)) det`` equals
    ``4 cos(phi/2) sin((phi - pi s)/2) (2 cos(pi s) + Q - 2)``.
    """
    p = _params(ModelId.DENSE, params)
    det = np.linalg.det(build_potts_system(Q, p).complex_rows)
    return float((1j * cmath.exp(-1j * (p.phi - math.pi * p.s / 2)) * det).real)


def potts_weight_ratio(gamma: float, alpha: float, beta: float | None = None) -> float:
    """``b/a = -cos x / cos(gamma + x)`` at the spin ``s = 1 - 2 gamma / pi``.

    Here ``x = (alpha + beta s) / 2``.

    Raises:
        ZeroDivisionError: at a pole of the ratio (``cos(gamma + x) = 0``).
    """
    if beta is None:
        beta = alpha
    s = 1 - 2 * gamma / math.pi
    x = (alpha + beta * s) / 2
    den = math.cos(gamma + x)
    if abs(den) < 1e-15:
        raise ZeroDivisionError(f"b/a has a pole at gamma={gamma}, alpha={alpha}, beta={beta}")
    return -math.cos(x) / den


def spectral_parameter(gamma: float, alpha: float, beta: float | None = None) -> float:
    """Spectral parameter ``u`` with ``b/a = sin(gamma - u) / sin(u)``.

    ``u = gamma - pi/2 + (alpha + beta s)/2`` at ``s = 1 - 2 gamma / pi``;
    it is linear in ``alpha``, and with :func:`isotropic_beta` it becomes
    ``u = gamma alpha / pi``.
    """
    if beta is None:
        beta = alpha
    s = 1 - 2 * gamma / math.pi
    return gamma - math.pi / 2 + (alpha + beta * s) / 2


def isotropic_beta(alpha: float) -> float:
    """The winding angle ``pi - alpha`` making ``alpha = pi u / gamma`` exact."""
    return math.pi - alpha


# -------------------------------------------------------------- dilute model


def _on_rows(n: float, p: SpinParams) -> np.ndarray:
    lam, mu = p.lam, p.mu
    return np.array(
        [
            [1, mu, -mu / lam, -1, 0, 0],
            [0, -1 / lam, n, lam * mu, -mu / lam, -mu / lam * n],
            [0, n, -lam, -mu / lam**2, mu * n, mu],
            [0, -mu / lam**2, mu * lam, n, -1 / lam**2, -lam**2],
        ],
        dtype=complex,
    )


def build_on_system(n: float, params: SpinParams, branch: str = "v_nonzero") -> HoloSystem:
    """Four complex equations in ``(t, u1, u2, v, w1, w2)``.

    Args:
        n: loop fugacity.
        params: spin and angles, ``lam = exp(i pi s)``, ``phi = (s+1) alpha``.
        branch: ``"v_nonzero"`` selects the 6x6 real system
            ``{Re eq1, Re eq2, Im eq2, Re eq3, Im eq3, Re eq4}``;
            ``"v_zero"`` drops the ``v`` column and ``eq4``, leaving 5x5.
    """
    p = _params(ModelId.DILUTE, params)
    rows = _on_rows(n, p)
    labels = ("eq1", "eq2", "eq3", "eq4")
    notes: tuple[str, ...] = ()
    if abs(n * n - 1) < 1e-12:
        notes = ("n^2 = 1: the reduced real system is singular for every spin",)
    if branch == "v_nonzero":
        selection = ((0, "re"), (1, "re"), (1, "im"), (2, "re"), (2, "im"), (3, "re"))
        columns = tuple(range(6))
    elif branch == "v_zero":
        selection = ((0, "re"), (1, "re"), (1, "im"), (2, "re"), (2, "im"))
        columns = (0, 1, 2, 4, 5)
    else:
        raise ValueError(f"unknown branch {branch!r}")
    return HoloSystem(ModelId.DILUTE, p, float(n), rows, SYMBOLS[ModelId.DILUTE], labels, selection, columns, notes)


def on_dependency_residuals(n: float, params: SpinParams, weights: WeightSet | np.ndarray) -> tuple[float, float]:
    """The two imaginary-part combinations that vanish for any real weights.

    ``Im[(n+1) E1 - lam/mu E2 + E3/mu]`` and
    ``Im[lam/mu (lam^2 - n/lam^2) E2 + (n lam^2 - 1/lam^2) E3/mu - (n^2-1) E4]``
    with ``Ek`` the value of equation ``k``. They explain why the eight real
    rows reduce to six.
    """
    system = build_on_system(n, params)
    lam, mu = system.params.lam, system.params.mu
    e1, e2, e3, e4 = system.residuals(weights)
    first = (n + 1) * e1 - lam / mu * e2 + e3 / mu
    second = lam / mu * (lam**2 - n / lam**2) * e2 + (n * lam**2 - 1 / lam**2) * e3 / mu - (n * n - 1) * e4
    return float(first.imag), float(second.imag)


def on_determinant(n: float, params: SpinParams, branch: str = "v_nonzero") -> float:
    """Closed-form determinant of the reduced real dilute system.

    ``v_nonzero``: ``(n^2-1) sin(phi) sin(phi - pi s) (2 cos 4 pi s - 3n + n^3)``.
    ``v_zero``: ``(n^2-1)^2 sin(phi) sin(phi - pi s)``.
    """
    p = _params(ModelId.DILUTE, params)
    base = math.sin(p.phi) * math.sin(p.phi - math.pi * p.s)
    if branch == "v_nonzero":
        return (n * n - 1) * base * (2 * math.cos(4 * math.pi * p.s) - 3 * n + n**3)
    if branch == "v_zero":
        return (n * n - 1) ** 2 * base
    raise ValueError(f"unknown branch {branch!r}")


# ----------------------------------------------------------- two-colour model


def build_c2_system(n: float, params: SpinParams) -> HoloSystem:
    """Three complex equations in ``(u1, u2, v, w1, w2)``, reduced to 5x5.

    The selection is ``{Re eq1, Im eq1, Re eq2, Im eq2, Re eq3}``; ``Im eq3``
    is a combination of the others when ``n^2 != 1``. At ``n^2 = 1`` the
    system is still built but flagged in :attr:`HoloSystem.notes`.
    """
    p = _params(ModelId.C2, params)
    lam, mu = p.lam, p.mu
    rows = np.array(
        [
            [n, -lam, -mu / lam, mu * n, mu],
            [-1 / lam, n, mu, -mu / lam, -mu / lam * n],
            [-mu / lam, mu, n, -1 / lam, -lam],
        ],
        dtype=complex,
    )
    notes: tuple[str, ...] = ()
    if abs(n * n - 1) < 1e-12:
        notes = ("n^2 = 1: dropping Im eq3 is not a valid reduction",)
    selection = ((0, "re"), (0, "im"), (1, "re"), (1, "im"), (2, "re"))
    return HoloSystem(
        ModelId.C2, p, float(n), rows, SYMBOLS[ModelId.C2], ("eq1", "eq2", "eq3"), selection, tuple(range(5)), notes
    )


def c2_dependency_residual(n: float, params: SpinParams, weights: WeightSet | np.ndarray) -> float:
    """``Im[(n lam - 1/lam) E1/mu + lam (lam - n/lam) E2/mu - (n^2-1) E3]``, zero for real weights.

    It makes ``Im eq3`` redundant when ``n^2 != 1``.
    """
    system = build_c2_system(n, params)
    lam, mu = system.params.lam, system.params.mu
    e1, e2, e3 = system.residuals(weights)
    total = (n * lam - 1 / lam) * e1 / mu + lam * (lam - n / lam) * e2 / mu - (n * n - 1) * e3
    return float(total.imag)


def c2_determinant(n: float, params: SpinParams) -> float:
    """``(n^2-1) sin(phi) sin(phi - 2 pi s) (2 cos 4 pi s - 3n + n^3)``."""
    p = _params(ModelId.C2, params)
    return (
        (n * n - 1)
        * math.sin(p.phi)
        * math.sin(p.phi - 2 * math.pi * p.s)
        * (2 * math.cos(4 * math.pi * p.s) - 3 * n + n**3)
    )


# ------------------------------------------------------------------ numerics


def numeric_determinant(system: HoloSystem) -> float | complex:
    """Determinant of the reduced system: complex 2x2 for the dense model, real otherwise."""
    if system.model is ModelId.DENSE:
        return complex(np.linalg.det(system.complex_rows))
    return float(np.linalg.det(system.matrix))


def null_space(system: HoloSystem, tol: float = 1e-10) -> list[np.ndarray]:
    """Orthonormal basis of the null space of :attr:`HoloSystem.matrix`.

    Singular values are normalised by the largest one; right singular
    vectors whose normalised value is below ``tol`` span the null space.
    Vectors are indexed by :attr:`HoloSystem.selected_unknowns`.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    A = system.matrix
    _, sv, vt = np.linalg.svd(A)
    n_cols = A.shape[1]
    if sv.size == 0 or sv[0] == 0.0:
        return [vt[i] for i in range(n_cols)]
    rel = np.zeros(n_cols)
    rel[: sv.size] = sv / sv[0]
    return [vt[i] for i in range(n_cols) if rel[i] < tol]


def projection_cosine(basis: list[np.ndarray], vector: np.ndarray) -> float:
    """Cosine between ``vector`` and its projection on ``span(basis)``.

    For a one-dimensional basis this is the absolute cosine similarity.
    Returns 0 for an empty basis.
    """
    vector = np.asarray(vector, dtype=float)
    norm = np.linalg.norm(vector)
    if not basis or norm == 0:
        return 0.0
    B = np.array(basis)
    return float(np.linalg.norm(B @ vector) / norm)


def _sigma_min(system: HoloSystem) -> float:
    """Smallest normalised singular value of all real rows (kept columns)."""
    sv = np.linalg.svd(system.real_rows[:, list(system.columns)], compute_uv=False)
    return float(sv[-1] / sv[0]) if sv[0] > 0 else 0.0


def _system(model: ModelId, fugacity: float, params: SpinParams) -> HoloSystem:
    if model is ModelId.DENSE:
        return build_potts_system(fugacity, params)
    if model is ModelId.DILUTE:
        return build_on_system(fugacity, params)
    return build_c2_system(fugacity, params)


def _real_det(model: ModelId, fugacity: float, params: SpinParams) -> float:
    if model is ModelId.DENSE:
        return potts_real_determinant(fugacity, params)
    return float(numeric_determinant(_system(model, fugacity, params)))


@dataclass(frozen=True)
class SpinRoot:
    """A spin at which the holomorphicity system becomes singular.

    Attributes:
        s: the root.
        kind: ``"fugacity"`` when it is a zero of the fugacity factor,
            ``"embedding-degenerate"`` when it only comes from ``sin(phi)``
            or ``sin(phi - k pi s)`` (it moves with ``alpha``), else
            ``"unexplained"``.
        alpha_independent: the system stays singular at the same ``s`` for
            other shear angles.
        closed_form: the matching closed-form spin, if within 1e-8.
    """

    s: float
    kind: str
    alpha_independent: bool
    closed_form: float | None = None

    def to_dict(self) -> dict:
        return {
            "s": self.s,
            "kind": self.kind,
            "alpha_independent": self.alpha_independent,
            "closed_form": self.closed_form,
        }


@dataclass(frozen=True)
class ScanResult:
    """Output of :func:`determinant_scan`.

    Attributes:
        roots: located roots, sorted by ``s``.
        samples: ``(s, value)`` grid of the scanned function.
        method: ``"determinant"`` (sign changes of the real determinant) or
            ``"singular-value"`` (minima of the smallest normalised singular
            value, used where the determinant vanishes identically).
        notes: caveats.
    """

    model: ModelId
    fugacity: float
    alpha: float
    roots: tuple[SpinRoot, ...]
    samples: tuple[tuple[float, float], ...]
    method: str
    notes: tuple[str, ...] = ()

    @property
    def spins(self) -> list[float]:
        """Roots that survive for every shear angle, i.e. candidate spins."""
        return [r.s for r in self.roots if r.kind == "fugacity" and r.alpha_independent]


def _fugacity_factor(model: ModelId, fugacity: float, s: float) -> float:
    if model is ModelId.DENSE:
        return 2 * math.cos(math.pi * s) + fugacity - 2
    n = fugacity
    return 2 * math.cos(4 * math.pi * s) - 3 * n + n**3


def _closed_form_spins(model: ModelId, fugacity: float) -> list[float]:
    """Principal spin values for this fugacity (possibly empty)."""
    if model is ModelId.DENSE:
        if not 0 <= fugacity <= 4:
            return []
        gamma = math.acos(math.sqrt(fugacity) / 2)
        return [1 - 2 * gamma / math.pi]
    if abs(fugacity) > 2:
        return []
    # n = -2 cos(2 eta) with eta in [0, pi/2], and its mirror eta -> pi - eta
    eta = (math.pi - math.acos(fugacity / 2)) / 2
    etas = [eta, math.pi - eta]
    if model is ModelId.DILUTE:
        return sorted(1.5 * e / math.pi - 0.5 for e in etas)
    return sorted((3 * e - math.pi) / (2 * math.pi) for e in etas)


def determinant_scan(
    model: "ModelId | str",
    fugacity: float,
    alpha: float,
    s_range: tuple[float, float] = (-1.0, 1.0),
    steps: int = 2000,
    *,
    degenerate: str = "fallback",
    tol: float = 1e-8,
) -> ScanResult:
    """Locate the spins where the holomorphicity system is singular.

    Sign changes of the real determinant on a uniform grid are refined with
    Brent's method. Each root is classified by which factor of the closed
    form vanishes there and checked for independence of ``alpha``.

    Args:
        model: loop model.
        fugacity: ``Q`` for the dense model, ``n`` otherwise.
        alpha: shear angle used for the scan.
        s_range: closed interval of spins; endpoints are not reported.
        steps: number of grid intervals, at least 2.
        degenerate: what to do when ``n^2 = 1`` makes the determinant
            vanish identically: ``"fallback"`` scans the smallest singular
            value of the full real system instead, ``"reject"`` raises.
        tol: threshold on normalised singular values and factor values.

    Raises:
        DegenerateFugacityError: ``n^2 = 1`` with ``degenerate="reject"``.
    """
    model = ModelId.parse(model)
    if steps < 2:
        raise ValueError("steps must be at least 2")
    lo, hi = s_range
    if not lo < hi:
        raise ValueError(f"empty spin range {s_range}")
    grid = np.linspace(lo, hi, steps + 1)
    notes: list[str] = []
    is_degenerate = model is not ModelId.DENSE and abs(fugacity * fugacity - 1) < 1e-12

    def params_at(s: float, a: float = alpha) -> SpinParams:
        return SpinParams(model, float(s), a)

    if is_degenerate:
        if degenerate == "reject":
            raise DegenerateFugacityError(f"n^2 = 1 (n = {fugacity}): the determinant vanishes identically")
        notes.append("n^2 = 1: determinant vanishes identically; scanned the smallest singular value instead")
        method = "singular-value"

        def f(s: float) -> float:
            return _sigma_min(_system(model, fugacity, params_at(s)))

        values = np.array([f(s) for s in grid])
        candidates = []
        for i in range(1, len(grid) - 1):
            if values[i] <= values[i - 1] and values[i] <= values[i + 1]:
                res = optimize.minimize_scalar(f, bounds=(grid[i - 1], grid[i + 1]), method="bounded", options={"xatol": 1e-13})
                if res.fun < tol:
                    candidates.append(float(res.x))
    else:
        method = "determinant"

        def f(s: float) -> float:
            return _real_det(model, fugacity, params_at(s))

        values = np.array([f(s) for s in grid])
        candidates = []
        for i in range(len(grid) - 1):
            if values[i] == 0.0 and 0 < i:
                candidates.append(float(grid[i]))
            elif values[i] * values[i + 1] < 0:
                candidates.append(float(optimize.brentq(f, grid[i], grid[i + 1], xtol=1e-15)))

    roots = []
    spins = _closed_form_spins(model, fugacity)
    other_alphas = [0.37 * math.pi, 0.71 * math.pi]
    for s in _dedupe(candidates):
        if s <= lo or s >= hi:
            continue
        p = params_at(s)
        shift = p.spin_factor * math.pi * s
        if abs(_fugacity_factor(model, fugacity, s)) < 1e-6:
            kind = "fugacity"
        elif abs(math.sin(p.phi)) < 1e-6 or abs(math.sin(p.phi - shift)) < 1e-6:
            kind = "embedding-degenerate"
        else:
            kind = "unexplained"
        independent = all(_sigma_min(_system(model, fugacity, params_at(s, a))) < 1e-7 for a in other_alphas)
        match = next((c for c in spins if abs(c - s) < 1e-8), None)
        roots.append(SpinRoot(s, kind, independent, match))
    samples = tuple((float(s), float(v)) for s, v in zip(grid, values))
    return ScanResult(model, float(fugacity), float(alpha), tuple(roots), samples, method, tuple(notes))


def _dedupe(values: list[float], eps: float = 1e-9) -> list[float]:
    out: list[float] = []
    for v in sorted(values):
        if not out or v - out[-1] > eps:
            out.append(v)
    return out
