"""Floating-point leaf integration and holonomy jets.

Exact fields cross into floating point exactly once, in :func:`to_numeric`.
Leaves are lifted along a path in the x-line by integrating dy/dx = fy/fx with
scipy's DOP853 (explicit Runge–Kutta of order 8 with embedded error control);
complex y is carried as two real components.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import polynomial as npoly
from scipy.integrate import solve_ivp

from .coeffs import to_complex
from .errors import NonHyperbolic, SingularEncounter, StepUnderflow
from .vfield import PlanarVectorField

__all__ = [
    "NumericField",
    "PathSpec",
    "HolonomyJet",
    "KoenigsReport",
    "to_numeric",
    "integrate_leaf",
    "holonomy_jet",
    "finite_difference_jet",
    "koenigs_check",
    "compose_jets",
    "invert_jet",
]

DEFAULT_RTOL = 1e-10
REFINE = 2.0 ** -8  # tolerance ratio of the refined run (one step halving for an order-8 scheme)


@dataclass(frozen=True)
class NumericField:
    """fx = Σ_j b_j(x) y^j and fy = Σ_j a_j(x) y^j with complex coefficient arrays."""

    b: tuple  # b[j]: coefficients of x^i, lowest first
    a: tuple

    def _eval(self, polys, x, y):
        total = 0j
        for coeffs in reversed(polys):
            total = total * y + npoly.polyval(x, coeffs)
        return total

    def fx(self, x, y) -> complex:
        return self._eval(self.b, x, y)

    def fy(self, x, y) -> complex:
        return self._eval(self.a, x, y)

    def y_coefficients(self, x, order: int):
        """(b_j(x))_j and (a_j(x))_j for j ≤ order."""
        def col(polys):
            out = np.zeros(order + 1, dtype=complex)
            for j in range(min(order + 1, len(polys))):
                out[j] = npoly.polyval(x, polys[j])
            return out

        return col(self.b), col(self.a)

    def axis_invariant(self) -> bool:
        return len(self.a) == 0 or not np.any(self.a[0])


def _component_arrays(s, N):
    polys = []
    for j in range(N + 1):
        c = np.zeros(N + 1, dtype=complex)
        for (i, jj), v in s._terms.items():
            if jj == j:
                c[i] = to_complex(v)
        polys.append(c)
    while polys and not np.any(polys[-1]):
        polys.pop()
    return tuple(polys)


def to_numeric(X: PlanarVectorField) -> NumericField:
    """The single exact → float frontier: coefficients rounded to complex doubles."""
    N = X.order
    return NumericField(_component_arrays(X.fx, N), _component_arrays(X.fy, N))


@dataclass(frozen=True)
class PathSpec:
    """A path s ∈ [0, 1] ↦ x(s) in the x-line.

    ``kind="circle"``: x = center + radius·exp(2iπ·orientation·turns·s),
    counterclockwise for orientation +1; the transversal is {x = center + radius}.
    ``kind="segment"``: straight segment from ``start`` to ``end`` (open path).
    """

    kind: str = "circle"
    radius: float = 1.0
    center: complex = 0j
    orientation: int = 1
    turns: int = 1
    start: complex = 0j
    end: complex = 1 + 0j
    rtol: float = DEFAULT_RTOL
    atol: float = 1e-13
    singular_threshold: float = 1e-12

    def point(self, s: float) -> complex:
        if self.kind == "circle":
            return self.center + self.radius * cmath.exp(2j * math.pi * self.orientation * self.turns * s)
        return self.start + (self.end - self.start) * s

    def velocity(self, s: float) -> complex:
        if self.kind == "circle":
            w = 2j * math.pi * self.orientation * self.turns
            return self.radius * w * cmath.exp(w * s)
        return self.end - self.start

    def reversed(self) -> "PathSpec":
        if self.kind == "circle":
            return _replace(self, orientation=-self.orientation)
        return _replace(self, start=self.end, end=self.start)


def _replace(p: PathSpec, **kw) -> PathSpec:
    from dataclasses import replace

    return replace(p, **kw)


def _pack(z: np.ndarray) -> np.ndarray:
    return np.concatenate([z.real, z.imag])


def _unpack(v: np.ndarray) -> np.ndarray:
    n = len(v) // 2
    return v[:n] + 1j * v[n:]


def _run(rhs, z0: np.ndarray, path: PathSpec, rtol: float, atol: float) -> np.ndarray:
    sol = solve_ivp(lambda s, v: _pack(rhs(s, _unpack(v))), (0.0, 1.0), _pack(np.asarray(z0, dtype=complex)),
                    method="DOP853", rtol=rtol, atol=atol)
    if sol.status == -1:
        raise StepUnderflow(sol.message)
    return _unpack(sol.y[:, -1])


def integrate_leaf(X, path: PathSpec, y0: complex, rtol: float | None = None) -> complex:
    """Endpoint y of the lift along ``path`` of the leaf through (x(0), y0).

    Raises
    ------
    SingularEncounter
        If |fx| falls below the path's threshold on the lifted trajectory.
    StepUnderflow
        If the adaptive step size underflows.
    """
    nf = X if isinstance(X, NumericField) else to_numeric(X)
    thr = path.singular_threshold

    def rhs(s, z):
        x = path.point(s)
        den = nf.fx(x, z[0])
        if abs(den) < thr:
            raise SingularEncounter(f"fx ≈ 0 at x = {x:.6g}, y = {z[0]:.6g}")
        return np.array([path.velocity(s) * nf.fy(x, z[0]) / den])

    return complex(_run(rhs, np.array([y0]), path, rtol or path.rtol, path.atol)[0])


def _series_div(num: np.ndarray, den: np.ndarray) -> np.ndarray:
    J = len(num) - 1
    out = np.zeros(J + 1, dtype=complex)
    for n in range(J + 1):
        acc = num[n] - np.dot(out[:n], den[n:0:-1]) if n else num[0]
        out[n] = acc / den[0]
    return out


def _series_mul(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    return np.convolve(p, q)[: len(p)]


def _jet_rhs(nf: NumericField, path: PathSpec, J: int):
    thr = path.singular_threshold

    def rhs(s, c):
        x = path.point(s)
        b, a = nf.y_coefficients(x, J)
        if abs(b[0]) < thr:
            raise SingularEncounter(f"fx(x, 0) ≈ 0 at x = {x:.6g}")
        R = _series_div(a, b) * path.velocity(s)
        # y(s) = Σ_(l≥1) c_l y0^l, compose R(y(s)) up to y0^J
        ys = np.concatenate([[0j], c])
        out = np.zeros(J + 1, dtype=complex)
        power = np.zeros(J + 1, dtype=complex)
        power[0] = 1
        for m in range(1, J + 1):
            power = _series_mul(power, ys)
            if R[m] != 0:
                out += R[m] * power
        return out[1:]

    return rhs


@dataclass
class HolonomyJet:
    """Jet y ↦ c_1 y + c_2 y² + … + c_j y^j of a transport or return map."""

    coefficients: list  # c_1..c_j
    error_estimates: list
    jet_order: int
    path: PathSpec = field(default=None, repr=False)

    @property
    def multiplier(self) -> complex:
        return self.coefficients[0]

    def coefficient(self, n: int) -> complex:
        return self.coefficients[n - 1]

    def to_dict(self):
        return {
            "jet_order": self.jet_order,
            "coefficients": [{"value": [c.real, c.imag], "error": e, "provenance": "numeric"}
                             for c, e in zip(self.coefficients, self.error_estimates)],
        }


def holonomy_jet(X, path: PathSpec, jet_order: int = 1) -> HolonomyJet:
    """Jet at y = 0 of the transport map along ``path`` from variational equations.

    The system dc_n/ds = [y0^n] x'(s)·R(x(s), Σ c_l y0^l), R = fy/fx as a
    series in y, is integrated twice (tolerance and tolerance·2^-8); the finer
    run is reported and the difference is the per-coefficient error estimate.
    """
    nf = X if isinstance(X, NumericField) else to_numeric(X)
    if not nf.axis_invariant():
        raise SingularEncounter("the axis {y = 0} is not invariant: no holonomy at y = 0")
    J = int(jet_order)
    if J < 1:
        raise ValueError("jet order must be >= 1")
    rhs = _jet_rhs(nf, path, J)
    c0 = np.zeros(J, dtype=complex)
    c0[0] = 1
    coarse = _run(rhs, c0, path, path.rtol, path.atol)
    fine = _run(rhs, c0, path, path.rtol * REFINE, path.atol * REFINE)
    err = [float(abs(f - c)) for f, c in zip(fine, coarse)]
    return HolonomyJet([complex(v) for v in fine], err, J, path)


def finite_difference_jet(X, path: PathSpec, jet_order: int, rho: float = 3e-3, samples: int = 16) -> list:
    """Jet coefficients from integrated leaves at y0 = ρ·e^(2iπk/M) (discrete Cauchy formula)."""
    nf = X if isinstance(X, NumericField) else to_numeric(X)
    M = samples
    ends = np.array([integrate_leaf(nf, path, rho * cmath.exp(2j * math.pi * k / M),
                                    rtol=path.rtol * REFINE) for k in range(M)])
    fft = np.fft.fft(ends) / M
    return [complex(fft[n] / rho ** n) for n in range(1, jet_order + 1)]


def compose_jets(a: list, b: list) -> list:
    """Coefficients of a∘b (both without constant term), to the shorter order."""
    J = min(len(a), len(b))
    bs = np.concatenate([[0j], np.asarray(b[:J], dtype=complex)])
    out = np.zeros(J + 1, dtype=complex)
    power = np.zeros(J + 1, dtype=complex)
    power[0] = 1
    for m in range(1, J + 1):
        power = _series_mul(power, bs)
        out += a[m - 1] * power
    return list(out[1:])


def invert_jet(a: list) -> list:
    """Compositional inverse of y ↦ Σ a_n y^n (a_1 ≠ 0)."""
    J = len(a)
    inv = [0j] * J
    inv[0] = 1 / a[0]
    for n in range(2, J + 1):
        trial = inv[:]
        trial[n - 1] = 0
        c = compose_jets(a, trial)[n - 1]
        inv[n - 1] = -c / a[0]
    return inv


@dataclass
class KoenigsReport:
    verdict: str
    multiplier: complex
    linearizer: list  # h_1 = 1, h_2, …
    residual: float
    jet_order: int


def koenigs_check(jet, jet_order: int | None = None, tol: float = 1e-12) -> KoenigsReport:
    """Kœnigs linearizer h with h∘φ = λ·h to the given order, and its residual.

    Raises
    ------
    NonHyperbolic
        If |λ| is 0 or 1 (within ``tol``).
    """
    coeffs = list(jet.coefficients) if isinstance(jet, HolonomyJet) else [complex(c) for c in jet]
    J = jet_order or len(coeffs)
    coeffs = (coeffs + [0j] * J)[:J]
    lam = coeffs[0]
    if abs(lam) < tol or abs(abs(lam) - 1) < tol:
        raise NonHyperbolic(f"|multiplier| = {abs(lam):.3g}")
    # h_n (λ − λ^n) = Σ_(m<n) h_m [φ^m]_n
    phi = np.concatenate([[0j], np.asarray(coeffs, dtype=complex)])
    powers = [None, phi.copy()]
    for m in range(2, J + 1):
        powers.append(_series_mul(powers[-1], phi))
    h = [0j, 1 + 0j] + [0j] * (J - 1)
    for n in range(2, J + 1):
        acc = sum(h[m] * powers[m][n] for m in range(1, n))
        h[n] = acc / (lam - lam ** n)
    hphi = np.zeros(J + 1, dtype=complex)
    for m in range(1, J + 1):
        hphi += h[m] * powers[m]
    residual = float(np.max(np.abs(hphi - lam * np.asarray(h))))
    return KoenigsReport(f"Linearizable-to-order-{J}", complex(lam), h[1:], residual, J)
