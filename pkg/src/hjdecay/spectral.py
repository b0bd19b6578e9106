"""Eigenproblem of L = -d2/dx2 on (0,1) with a*phi(0) + 2*phi'(0) = 0
and phi(1) = 0, and everything it controls: the decay exponent
r1(a) = a^2/4 + alpha_1, the exact series solution of the reduced
convection-diffusion problem, and the first-mode asymptotics.

Positive eigenvalues alpha = z^2 solve tan(z) = 2z/a; the root search
bisects the stabilized form a*sin(z) - 2z*cos(z) inside analytically
guaranteed brackets, so no pole of tan is ever touched and convergence
is unconditional.  For a > 2 the first mode is negative,
alpha_1 = -s^2 with (a+2s) = (a-2s) e^{2s}, and for a = 2 it is the
linear profile sqrt(3)(1-x) with alpha_1 = 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import NamedTuple

import numpy as np

from .domain import Grid1D, GridFunction, UNIT, inner_product, l2_norm, sup_norm

BRACKET_SHRINK = 1e-9
BISECT_TOL = 1e-13
RESIDUAL_TOL = 1e-12
IDENTITY_TOL = 1e-10
LAMBDA1_FULL = math.pi ** 2 / 4.0


class SpectralError(RuntimeError):
    pass


class SeriesTruncationError(SpectralError):
    """Truncation tail exceeds the requested tolerance."""

    def __init__(self, needed_modes: int, tail: float, tol: float):
        self.needed_modes = needed_modes
        super().__init__(
            f"series tail bound {tail:.3e} exceeds tolerance {tol:.3e}; need about {needed_modes} modes"
        )


class Branch(str, Enum):
    TRIG = "trig"
    LINEAR = "linear"
    HYPERBOLIC = "hyperbolic"


@dataclass(frozen=True)
class EigenMode:
    index: int
    alpha: float
    branch: Branch
    amplitude: float
    sqrt_param: float
    residual: float

    def eigenfunction_values(self, x: np.ndarray) -> np.ndarray:
        if self.branch is Branch.TRIG:
            return self.amplitude * np.sin(self.sqrt_param * (1.0 - x))
        if self.branch is Branch.HYPERBOLIC:
            return self.amplitude * np.sinh(self.sqrt_param * (1.0 - x))
        return math.sqrt(3.0) * (1.0 - x)


@dataclass(frozen=True)
class RobinSpectrum:
    a: float
    modes: tuple
    n_modes: int

    def __post_init__(self):
        alphas = [m.alpha for m in self.modes]
        if any(b >= c for b, c in zip(alphas, alphas[1:])):
            raise SpectralError("eigenvalues must be strictly increasing")
        bad = [m for m in self.modes if m.residual > RESIDUAL_TOL]
        if bad:
            raise SpectralError(f"mode {bad[0].index} residual {bad[0].residual:.3e} above {RESIDUAL_TOL}")

    def alphas(self) -> np.ndarray:
        return np.array([m.alpha for m in self.modes])

    def phi(self, n: int, grid: Grid1D) -> GridFunction:
        if grid.interval != UNIT:
            raise ValueError("eigenfunctions live on (0,1)")
        v = self.modes[n - 1].eigenfunction_values(grid.nodes())
        v[-1] = 0.0
        return GridFunction(grid, v)

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            fh.write("n,alpha,branch,amplitude,residual\n")
            for m in self.modes:
                fh.write(f"{m.index},{m.alpha:.17g},{m.branch.value},{m.amplitude:.17g},{m.residual:.17g}\n")


@dataclass(frozen=True)
class DecayExponent:
    a: float
    alpha1: float

    @property
    def r1(self) -> float:
        return self.a * self.a / 4.0 + self.alpha1


def _bisect(f, lo: float, hi: float, tol: float = BISECT_TOL) -> float:
    flo, fhi = f(lo), f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if (flo > 0) == (fhi > 0):
        raise SpectralError(f"no sign change on bracket ({lo}, {hi})")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if not lo < mid < hi:
            break
        fm = f(mid)
        if fm == 0.0:
            return mid
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi, fhi = mid, fm
    return 0.5 * (lo + hi)


def trig_bracket(a: float, n: int) -> tuple[float, float]:
    """Root bracket for the n-th positive solution of tan(z) = 2z/a."""
    if a < 0:
        return ((2 * n - 1) * math.pi / 2.0, n * math.pi)
    return ((n - 1) * math.pi, (2 * n - 1) * math.pi / 2.0)


def _trig_f(a: float):
    return lambda z: a * math.sin(z) - 2.0 * z * math.cos(z)


def _trig_residual(a: float, z: float) -> float:
    # |tan z - 2z/a| / (1 + tan^2 z), evaluated pole-free
    return abs(math.cos(z)) * abs(a * math.sin(z) - 2.0 * z * math.cos(z)) / abs(a)


def _trig_mode(a: float, n: int, index: int) -> EigenMode:
    lo, hi = trig_bracket(a, n)
    z = _bisect(_trig_f(a), lo + BRACKET_SHRINK, hi - BRACKET_SHRINK)
    amp = 2.0 / math.sqrt(2.0 - math.sin(2.0 * z) / z)
    return EigenMode(index, z * z, Branch.TRIG, amp, z, _trig_residual(a, z))


def _hyperbolic_f(a: float):
    def h(s: float) -> float:
        d = a - 2.0 * s
        if d == 0.0:
            return a + 2.0 * s
        return (a + 2.0 * s) - d * math.exp(2.0 * s)

    return h


def _hyperbolic_residual(a: float, s: float) -> float:
    h = _hyperbolic_f(a)(s)
    return abs(h) / (1.0 + math.exp(2.0 * s))


def _hyperbolic_mode(a: float) -> EigenMode:
    # alpha_1 = -s^2 with s in (sqrt(a(a-2))/2, a/2]; for large a the
    # root sits within an ulp of a/2, so the closed right end stays in.
    lo = 0.5 * math.sqrt(a * (a - 2.0))
    s = _bisect(_hyperbolic_f(a), lo * (1.0 + 1e-12), a / 2.0)
    amp = 2.0 / math.sqrt(math.sinh(2.0 * s) / s - 2.0)
    return EigenMode(1, -s * s, Branch.HYPERBOLIC, amp, s, _hyperbolic_residual(a, s))


def compute_spectrum(a: float, n_modes: int) -> RobinSpectrum:
    """First n_modes eigenvalues of L with verified roots and the
    normalization constants of the eigenfunctions."""
    if a == 0.0:
        raise ValueError("the eigenproblem needs a != 0")
    if n_modes < 1:
        raise ValueError("n_modes must be >= 1")
    modes = []
    if a < 2.0:
        for n in range(1, n_modes + 1):
            modes.append(_trig_mode(a, n, n))
    else:
        if a == 2.0:
            modes.append(EigenMode(1, 0.0, Branch.LINEAR, math.sqrt(3.0), 0.0, 0.0))
        else:
            modes.append(_hyperbolic_mode(a))
        for n in range(2, n_modes + 1):
            modes.append(_trig_mode(a, n, n))
    return RobinSpectrum(a, tuple(modes), n_modes)


def decay_rate_r1(a: float) -> DecayExponent:
    """Decay exponent r1(a) = a^2/4 + alpha_1, cross-checked against the
    closed-form identities that the root equations imply."""
    if a == 0.0:
        raise ValueError("r1(a) needs a != 0")
    mode = compute_spectrum(a, 1).modes[0]
    exp = DecayExponent(a, mode.alpha)
    r1 = exp.r1
    if 0.0 < a < 2.0:
        z = mode.sqrt_param
        ident = (z / math.sin(z)) ** 2
        if abs(r1 - ident) > IDENTITY_TOL:
            raise SpectralError(f"r1 identity failed for a={a}: {r1!r} vs {ident!r}")
    elif a > 2.0:
        s = mode.sqrt_param
        e2s = math.exp(2.0 * s)
        ident1 = 0.25 * (a + 2.0 * s) ** 2 * math.exp(-2.0 * s)
        ident2 = 4.0 * s * s * e2s / (e2s - 1.0) ** 2
        if abs(r1 - ident1) > IDENTITY_TOL or abs(r1 - ident2) > IDENTITY_TOL:
            raise SpectralError(f"r1 identities failed for a={a}: {r1!r} vs {ident1!r}, {ident2!r}")
    return exp


def to_reduced_v(u0: GridFunction, a: float) -> GridFunction:
    """Transform an initial datum on (0,1) to the self-adjoint frame:
    v0(x) = e^{-a x / 2} u0(x)."""
    if u0.grid.interval != UNIT:
        raise ValueError("to_reduced_v expects a field on (0,1)")
    if u0.values[-1] != 0.0:
        raise ValueError("u0 must vanish at x = 1")
    x = u0.grid.nodes()
    return GridFunction(u0.grid, np.exp(-a * x / 2.0) * u0.values)


class SeriesResult(NamedTuple):
    field: GridFunction
    tail_bound: float


def series_tail_bound(a: float, t: float, n_modes: int, v0_l2: float) -> float:
    """Sup-norm bound on the modes beyond n_modes, from |c_n| <= ||v0||_2,
    A_n <= sqrt(pi) and alpha_n >= ((n-1) pi)^2."""
    if t <= 0:
        return math.inf
    lam = (n_modes * math.pi) ** 2  # alpha_{n_modes+1} lower bound
    ratio = math.exp(-(2 * n_modes + 1) * math.pi ** 2 * t)
    head = math.exp(-(a * a / 4.0 + lam) * t)
    envelope = math.exp(max(a, 0.0) / 2.0) * math.sqrt(math.pi) * v0_l2
    return envelope * head / (1.0 - ratio)


def modes_needed(a: float, t: float, v0_l2: float, tol: float) -> int:
    n = 1
    while series_tail_bound(a, t, n, v0_l2) > tol and n < 100000:
        n += 1
    return n


def series_coefficients(v0: GridFunction, spectrum: RobinSpectrum) -> np.ndarray:
    return np.array([inner_product(v0, spectrum.phi(n, v0.grid)) for n in range(1, spectrum.n_modes + 1)])


def series_evolve(v0: GridFunction, spectrum: RobinSpectrum, t: float,
                  tail_tol: float | None = None) -> SeriesResult:
    """Evaluate the exact solution of the reduced problem at time t > 0:

        u(t,x) = sum_n e^{-(a^2/4 + alpha_n) t} e^{a x / 2} <v0,phi_n> phi_n(x)

    on v0's grid, together with a rigorous truncation tail bound."""
    if t <= 0:
        raise ValueError("series_evolve needs t > 0 (pointwise convergence)")
    a = spectrum.a
    tail = series_tail_bound(a, t, spectrum.n_modes, l2_norm(v0))
    if tail_tol is not None and tail > tail_tol:
        raise SeriesTruncationError(modes_needed(a, t, l2_norm(v0), tail_tol), tail, tail_tol)
    grid = v0.grid
    x = grid.nodes()
    coeffs = series_coefficients(v0, spectrum)
    weights = coeffs * np.exp(-(a * a / 4.0 + spectrum.alphas()) * t)
    acc = np.zeros(grid.n_nodes)
    for w, mode in zip(weights, spectrum.modes):
        acc += w * mode.eigenfunction_values(x)
    acc *= np.exp(a * x / 2.0)
    acc[-1] = 0.0
    return SeriesResult(GridFunction(grid, acc), tail)


def mode1_asymptote(v0: GridFunction, spectrum: RobinSpectrum, t: float, x: float) -> float:
    """Leading-mode prediction <v0,phi_1> phi_1(x) for the rescaled
    solution e^{r1 t} e^{-a x/2} u(t, x), valid for t >= 1."""
    if t < 1.0:
        raise ValueError("the first-mode asymptote is asserted for t >= 1 only")
    c1 = inner_product(v0, spectrum.phi(1, v0.grid))
    return c1 * float(spectrum.modes[0].eigenfunction_values(np.array([x]))[0])


def mode1_residual_sup(v0: GridFunction, spectrum: RobinSpectrum, t: float) -> float:
    """Sup over the grid of the rescaled solution minus its first mode.

    Algebraically this is the tail sum over modes n >= 2 and it is
    evaluated that way: the subtraction in the defining expression
    cancels catastrophically in floating point once the tail drops
    below the mode-1 roundoff scale."""
    grid = v0.grid
    x = grid.nodes()
    coeffs = series_coefficients(v0, spectrum)
    alphas = spectrum.alphas()
    acc = np.zeros(grid.n_nodes)
    for n in range(2, spectrum.n_modes + 1):
        w = coeffs[n - 1] * math.exp(-(alphas[n - 1] - alphas[0]) * t)
        acc += w * spectrum.modes[n - 1].eigenfunction_values(x)
    return float(np.max(np.abs(acc)))


def r1_sweep(a_values) -> list[DecayExponent]:
    """Decay exponents for a sweep of a values; exact zeros are skipped
    because the eigenproblem needs a != 0."""
    return [decay_rate_r1(float(a)) for a in a_values if a != 0.0]


def sweep_to_csv(exponents, path) -> None:
    with open(path, "w", newline="") as fh:
        fh.write("a,alpha1,r1,lambda1_ratio\n")
        for e in exponents:
            fh.write(f"{e.a:.17g},{e.alpha1:.17g},{e.r1:.17g},{e.r1 / LAMBDA1_FULL:.17g}\n")
