"""Numerical engines: real-line quadrature, quartic roots, Lyapunov solver.

The quadrature is a vectorised adaptive Gauss-Kronrod (7/15) scheme.  It is
written here rather than borrowed from :func:`scipy.integrate.quad` for two
reasons: the integrands of this package are cheap numpy expressions, so
evaluating every active panel in one call is far faster than scalar
callbacks; and the spectra have peaks whose width is up to 1e-5 of their
position, so the caller must be able to seed the subdivision with the pole
locations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import DegenerateError, QuadratureError, SingularError

# Gauss-Kronrod 7/15 abscissae and weights (QUADPACK qk15).
_XGK = np.array([
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082, 0.279705391489276667901467263847913,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327,
])
_NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])  # 15 nodes in [-1, 1]
_KRONROD = np.concatenate([_WGK[:-1], _WGK[::-1]])
_GAUSS = np.zeros(15)
_GAUSS[[1, 3, 5, 7, 9, 11, 13]] = np.concatenate([_WG[:-1], _WG[::-1]])

_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class QuadratureConfig:
    """Tolerances for :func:`integrate_real_line`.

    Attributes
    ----------
    rel_tol, abs_tol : float
        Stop when the estimated error is below ``max(abs_tol, rel_tol*|I|)``.
    max_subdivisions : int
        Maximum number of panels before giving up.
    tail_map : {"algebraic", "exponential"}
        Change of variables on ``|nu| > R``.  ``algebraic`` is
        ``nu = R + R t / (1 - t**2)`` and suits integrands decaying like a
        power; ``exponential`` is ``nu = R - R log(1 - t)`` and is only
        appropriate for integrands decaying faster than any power.
    """

    rel_tol: float = 1e-9
    abs_tol: float = 0.0
    max_subdivisions: int = 2000
    tail_map: str = "algebraic"

    def __post_init__(self):
        if not self.rel_tol > 0 or self.abs_tol < 0:
            raise ValueError("tolerances must be positive")
        if self.tail_map not in ("algebraic", "exponential"):
            raise ValueError(f"unknown tail_map {self.tail_map!r}")


DEFAULT_QUADRATURE = QuadratureConfig()


def _gk_panels(g, a, b):
    """Apply the 15-point rule to panels ``[a_i, b_i]`` of ``g``.

    Returns Kronrod estimate, error estimate and the integral of ``|g|``.
    """
    half = 0.5 * (b - a)
    mid = 0.5 * (a + b)
    x = mid[:, None] + half[:, None] * _NODES[None, :]
    fx = np.asarray(g(x.ravel()), dtype=float).reshape(x.shape)
    if not np.all(np.isfinite(fx)):
        raise QuadratureError("integrand returned a non-finite value")
    kron = fx @ _KRONROD * half
    gauss = fx @ _GAUSS * half
    absval = np.abs(fx) @ _KRONROD * np.abs(half)
    mean = kron / np.where(half != 0, half, 1.0) / 2.0
    resasc = np.abs(fx - mean[:, None]) @ _KRONROD * np.abs(half)
    diff = np.abs(kron - gauss)
    with np.errstate(divide="ignore", invalid="ignore"):
        scaled = np.where(resasc > 0, resasc * np.minimum(1.0, (200.0 * diff / resasc) ** 1.5), diff)
    floor = 50.0 * _EPS * absval
    err = np.maximum(scaled, floor)
    return kron, err, absval


def _adaptive(g, edges: np.ndarray, cfg: QuadratureConfig, budget: int):
    """Adaptive subdivision of ``g`` over consecutive ``edges``."""
    a = edges[:-1].copy()
    b = edges[1:].copy()
    val, err, absval = _gk_panels(g, a, b)
    while True:
        total = val.sum()
        tol = max(cfg.abs_tol, cfg.rel_tol * abs(total), 50.0 * _EPS * absval.sum())
        if err.sum() <= tol:
            return total, err.sum(), len(a)
        width_floor = 64.0 * _EPS * np.maximum(np.abs(a), np.abs(b))
        splittable = (b - a) > width_floor
        pick = (err > tol / (2.0 * len(a))) & splittable
        if not pick.any():
            # only unsplittable panels remain above tolerance: accept
            return total, err.sum(), len(a)
        if len(a) + pick.sum() > budget:
            raise QuadratureError(
                f"no convergence within {budget} panels: estimate {total:.6e}, "
                f"error {err.sum():.3e} > tolerance {tol:.3e}"
            )
        m = 0.5 * (a[pick] + b[pick])
        new_a = np.concatenate([a[pick], m])
        new_b = np.concatenate([m, b[pick]])
        nv, ne, na = _gk_panels(g, new_a, new_b)
        keep = ~pick
        a = np.concatenate([a[keep], new_a])
        b = np.concatenate([b[keep], new_b])
        val = np.concatenate([val[keep], nv])
        err = np.concatenate([err[keep], ne])
        absval = np.concatenate([absval[keep], na])
        order = np.argsort(a, kind="stable")  # fixed order: deterministic sums
        a, b, val, err, absval = a[order], b[order], val[order], err[order], absval[order]


def _tail(f, radius: float, sign: float, kind: str):
    """Integrand on ``t in (0, 1)`` equivalent to ``f`` on ``sign*(R, inf)``."""
    if kind == "algebraic":
        def g(t):
            one = 1.0 - t * t
            nu = radius + radius * t / one
            return f(sign * nu) * radius * (1.0 + t * t) / (one * one)
    else:
        def g(t):
            nu = radius - radius * np.log1p(-t)
            return f(sign * nu) * radius / (1.0 - t)
    return g


def feature_breakpoints(features: Iterable[tuple[float, float]], radius: float) -> np.ndarray:
    """Initial panel edges clustered geometrically around each feature.

    Each feature ``(center, width)`` contributes ``center`` and
    ``center +/- width * 10**k`` for ``k = 0..8`` inside ``(-radius, radius)``.
    """
    pts = [-radius, 0.0, radius]
    for center, width in features:
        width = abs(width)
        if not (math.isfinite(center) and abs(center) < radius):
            continue
        pts.append(center)
        if width > 0 and math.isfinite(width):
            for k in range(9):
                step = width * 10.0**k
                if step > radius:
                    break
                pts.extend((center - step, center + step))
    pts = np.unique(np.clip(np.asarray(pts, dtype=float), -radius, radius))
    return pts


def integrate_real_line(
    f: Callable[[np.ndarray], np.ndarray],
    cfg: QuadratureConfig | None = None,
    *,
    features: Sequence[tuple[float, float]] = (),
    scale: float = 1.0,
) -> tuple[float, float]:
    """Integrate a vectorised ``f`` over the whole real line.

    Parameters
    ----------
    f : callable
        Accepts a 1-D float array and returns an array of the same shape.
        Must decay at least like ``|nu|**-2``.
    cfg : QuadratureConfig, optional
    features : sequence of (center, width)
        Peak positions and widths used to pre-split the finite core.  For the
        sharp resonances of this package this is required for reliable
        results.
    scale : float
        Characteristic size used for the core when no features are given.

    Returns
    -------
    value, err_estimate : float

    Raises
    ------
    QuadratureError
        If the panel budget is exhausted.
    """
    cfg = cfg or DEFAULT_QUADRATURE
    extent = [abs(c) + abs(w) for c, w in features if math.isfinite(c) and math.isfinite(w)]
    radius = 2.0 * max(extent) if extent else abs(scale)
    if not radius > 0:
        radius = 1.0
    edges = feature_breakpoints(features, radius)
    budget = cfg.max_subdivisions
    core, core_err, used = _adaptive(f, edges, cfg, budget)
    tail_edges = np.array([0.0, 0.25, 0.5, 0.75, 0.9, 1.0])
    total, total_err = core, core_err
    for sign in (1.0, -1.0):
        value, err, n = _adaptive(_tail(f, radius, sign, cfg.tail_map), tail_edges, cfg, max(budget - used, 8))
        used += n
        total += value
        total_err += err
    return float(total), float(total_err)


def integrate_interval(f, a: float, b: float, cfg: QuadratureConfig | None = None,
                       points: Sequence[float] = ()) -> tuple[float, float]:
    """Adaptive integral of a vectorised ``f`` over a finite ``[a, b]``."""
    cfg = cfg or DEFAULT_QUADRATURE
    edges = np.unique(np.clip(np.asarray([a, b, *points], dtype=float), a, b))
    value, err, _ = _adaptive(f, edges, cfg, cfg.max_subdivisions)
    return float(value), float(err)


def integrate_semi_infinite(f, a: float, cfg: QuadratureConfig | None = None) -> tuple[float, float]:
    """Adaptive integral of ``f`` over ``[a, inf)`` with ``a > 0`` via the tail map."""
    cfg = cfg or DEFAULT_QUADRATURE
    g = _tail(f, a, 1.0, cfg.tail_map)
    value, err, _ = _adaptive(g, np.array([0.0, 0.25, 0.5, 0.75, 0.9, 1.0]), cfg, cfg.max_subdivisions)
    return float(value), float(err)


def poly_eval(coeffs, x):
    """Horner evaluation; ``coeffs`` ordered from the highest power."""
    out = np.zeros_like(np.asarray(x, dtype=complex))
    for c in coeffs:
        out = out * x + c
    return out


def roots_quartic(coeffs: Sequence[complex]) -> np.ndarray:
    """Roots of ``c0 x^4 + c1 x^3 + c2 x^2 + c3 x + c4``.

    Eigenvalues of the balanced companion matrix, then at most five Newton
    steps per root (a step is kept only if it lowers ``|p|``).  Real input
    coefficients yield exactly conjugate root pairs.

    Raises
    ------
    DegenerateError
        If the leading coefficient is below 1e-300 in magnitude.
    """
    c = np.asarray(coeffs)
    if c.shape != (5,):
        raise ValueError("a quartic needs exactly five coefficients")
    if abs(c[0]) < 1e-300:
        raise DegenerateError("leading coefficient vanishes")
    real = np.isrealobj(c) or not np.any(np.imag(c))
    c = np.real(c).astype(float) if real else c.astype(complex)
    monic = c / c[0]
    scale = max(abs(monic[k]) ** (1.0 / k) for k in range(1, 5)) or 1.0
    scaled = monic * scale ** -np.arange(5.0)
    comp = np.zeros((4, 4), dtype=scaled.dtype)
    comp[0, :] = -scaled[1:]
    comp[1:, :-1] = np.eye(3)
    roots = np.linalg.eigvals(comp).astype(complex) * scale
    deriv = np.polyder(monic)
    for _ in range(5):
        pv = poly_eval(monic, roots)
        dv = poly_eval(deriv, roots)
        safe = dv != 0
        trial = np.where(safe, roots - np.where(safe, pv / np.where(safe, dv, 1), 0), roots)
        better = np.abs(poly_eval(monic, trial)) < np.abs(pv)
        if not better.any():
            break
        roots = np.where(better, trial, roots)
    return roots


@dataclass(frozen=True)
class LyapunovProblem:
    """Steady-state covariance problem ``A S + S A^T + D = 0``."""

    drift: np.ndarray
    diffusion: np.ndarray


def lyapunov_steady(prob: LyapunovProblem | tuple) -> np.ndarray:
    """Solve the continuous Lyapunov equation by Kronecker vectorisation.

    Parameters
    ----------
    prob : LyapunovProblem or (A, D)

    Returns
    -------
    ndarray
        Symmetric stationary covariance ``S``.

    Raises
    ------
    SingularError
        If ``A`` is not Hurwitz.
    """
    if isinstance(prob, LyapunovProblem):
        a, d = prob.drift, prob.diffusion
    else:
        a, d = prob
    a = np.asarray(a, dtype=float)
    d = np.asarray(d, dtype=float)
    n = a.shape[0]
    eig = np.linalg.eigvals(a)
    if np.max(eig.real) >= 0:
        raise SingularError(f"drift matrix is not Hurwitz (max Re eigenvalue {np.max(eig.real):.3e})")
    eye = np.eye(n)
    kron = np.kron(a, eye) + np.kron(eye, a)
    sigma = np.linalg.solve(kron, -d.ravel()).reshape(n, n)
    sigma = 0.5 * (sigma + sigma.T)
    # one step of iterative refinement
    resid = a @ sigma + sigma @ a.T + d
    sigma += np.linalg.solve(kron, -resid.ravel()).reshape(n, n)
    return 0.5 * (sigma + sigma.T)
