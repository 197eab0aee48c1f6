"""Position and momentum fluctuation spectra of the coupled oscillator.

All spectra are dimensionless in the scaled variables ``q_hat = q sqrt(m Omega / hbar)``
and ``p_hat = p / sqrt(m hbar Omega)``; SI second moments are restored in
:func:`moment_integrals`.  Every function accepts scalar or array ``nu`` (rad/s).
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .bath_spectrum import NoiseSpectrum, OccupationSpectrum
from .errors import DivergentIntegralError, DomainError, InstabilityError
from .numerics import QuadratureConfig, integrate_real_line
from .oscillator_markov import EquilibriumMoments
from .optomech_linear import OperatingPoint
from .params import HBAR


def _require_stable(op: OperatingPoint) -> None:
    if not op.stable:
        raise InstabilityError(
            f"operating point at detuning {op.detuning:.6e} rad/s is unstable "
            f"({op.stability.criterion}, margin {op.stability.margin:.3e})"
        )


def _spec(op: OperatingPoint, spec: OccupationSpectrum | None) -> OccupationSpectrum:
    return op.occupation if spec is None else spec


def _shape(nu, out):
    return float(out) if np.ndim(nu) == 0 else out


def _abs_d2(op: OperatingPoint, nu):
    return np.abs(op.char_poly(nu)) ** 2


def sq_rp(op: OperatingPoint, spec: OccupationSpectrum | None, nu):
    """Radiation-pressure part of the position spectrum.

    ``Omega omega G^2 gc (Delta^2 + gc^2/4 + nu^2) / (2 |d(nu)|^2)``; it does
    not depend on the bath, ``spec`` is accepted for a uniform signature.
    """
    _require_stable(op)
    nu = np.asarray(nu, dtype=float)
    gc, dl = op.gamma_c, op.detuning
    out = (op.bare_frequency * op.damped_frequency * op.coupling**2 * gc
           * (dl * dl + gc * gc / 4 + nu * nu) / (2 * _abs_d2(op, nu)))
    return _shape(nu, out)


def sq_th(op: OperatingPoint, spec: OccupationSpectrum | None, nu):
    """Thermal part of the position spectrum, ``Omega r(nu) |c(nu)|^2 |c(-nu)|^2 / |d|^2``.

    ``r`` is the bath noise spectrum divided by ``m hbar`` and ``|c(nu)|^2 =
    gc^2/4 + (nu - Delta)^2`` is the cavity response.
    """
    _require_stable(op)
    nu = np.asarray(nu, dtype=float)
    r = NoiseSpectrum(op.mech, _spec(op, spec)).reduced(nu)
    h2, dl = op.gamma_c**2 / 4, op.detuning
    out = op.bare_frequency * r * (h2 + (nu - dl) ** 2) * (h2 + (nu + dl) ** 2) / _abs_d2(op, nu)
    return _shape(nu, out)


def _weights(op, spec, nu):
    s = _spec(op, spec)
    return s(nu) + 0.5, s(-nu) + 0.5


def sp_th(op: OperatingPoint, spec: OccupationSpectrum | None, nu):
    """Thermal part of the momentum spectrum."""
    _require_stable(op)
    nu = np.asarray(nu, dtype=float)
    om, w, gm, gc, dl = op.bare_frequency, op.damped_frequency, op.gamma_m, op.gamma_c, op.detuning
    g2wd = op.coupling**2 * w * dl

    def branch(x):
        return np.abs((om * om + x * (w - 0.5j * gm)) * (dl * dl + (0.5 * gc - 1j * x) ** 2) - g2wd) ** 2

    wp, wm = _weights(op, spec, nu)
    out = gm / (2 * w * om * _abs_d2(op, nu)) * (branch(nu) * wp + branch(-nu) * wm)
    return _shape(nu, out)


def sqp_th(op: OperatingPoint, spec: OccupationSpectrum | None, nu):
    """Symmetrised position-momentum cross spectrum (thermal; may be negative)."""
    _require_stable(op)
    nu = np.asarray(nu, dtype=float)
    om, w, gm, gc, dl = op.bare_frequency, op.damped_frequency, op.gamma_m, op.gamma_c, op.detuning
    c2 = dl * dl + gc * gc / 4

    def branch(x):
        return 0.5 * gm * (c2 - x * x) - x * gc * (w + x)

    wp, wm = _weights(op, spec, nu)
    extra = gm * op.coupling**2 * dl / (2 * _abs_d2(op, nu)) * (branch(nu) * wp + branch(-nu) * wm)
    out = -gm / (2 * om) * np.asarray(sq_th(op, spec, nu)) + extra
    return _shape(nu, out)


def sp_minus_sq(op: OperatingPoint, spec: OccupationSpectrum | None, nu):
    """``sp_th - sq_th`` from its own closed form, proportional to ``G^2 Delta``."""
    _require_stable(op)
    nu = np.asarray(nu, dtype=float)
    om, w, gm, gc, dl = op.bare_frequency, op.damped_frequency, op.gamma_m, op.gamma_c, op.detuning
    g2 = op.coupling**2
    c2 = dl * dl + gc * gc / 4

    def branch(x):
        return 0.5 * g2 * dl + x * x * gm * gc / (2 * w) + (om * om / w + x) * (x * x - c2)

    wp, wm = _weights(op, spec, nu)
    out = w * gm * g2 * dl / (om * _abs_d2(op, nu)) * (branch(nu) * wp + branch(-nu) * wm)
    return _shape(nu, out)


def sq_total(op: OperatingPoint, spec: OccupationSpectrum | None, nu):
    return _shape(nu, np.asarray(sq_rp(op, spec, nu)) + np.asarray(sq_th(op, spec, nu)))


def sp_total(op: OperatingPoint, spec: OccupationSpectrum | None, nu):
    """``(nu/Omega)^2 sq_rp + sp_th``."""
    nu_a = np.asarray(nu, dtype=float)
    out = (nu_a / op.bare_frequency) ** 2 * np.asarray(sq_rp(op, spec, nu)) + np.asarray(sp_th(op, spec, nu))
    return _shape(nu, out)


def transfer_oracle(op: OperatingPoint, spec: OccupationSpectrum | None, nu) -> dict:
    """Spectra rebuilt from the resolvent of the drift matrix.

    Solves ``(A + i nu) F = C`` where the columns of ``C`` inject the two
    thermal sidebands and the two optical vacuum sidebands into ``(q, p, X, Y)``,
    then sums ``|F|^2`` against the input correlations.  Slow and meant as a
    test oracle.

    Returns
    -------
    dict
        Arrays ``Sq, Sp, Sqp, Sq_rp, Sq_th`` over ``nu``.
    """
    _require_stable(op)
    nu_arr = np.atleast_1d(np.asarray(nu, dtype=float))
    om, w, gm, gc = op.bare_frequency, op.damped_frequency, op.gamma_m, op.gamma_c
    tau = complex(w / om, -gm / (2 * om))
    c = math.sqrt(gm * om / (2 * w))
    s = math.sqrt(gc / 2)
    inject = np.array([
        [tau.conjugate() * c, tau * c, 0, 0],
        [-1j * c, 1j * c, 0, 0],
        [0, 0, s, s],
        [0, 0, -1j * s, 1j * s],
    ], dtype=complex)
    occ = _spec(op, spec)
    out = {k: np.empty(nu_arr.shape) for k in ("Sq", "Sp", "Sqp", "Sq_rp", "Sq_th")}
    eye = np.eye(4)
    for i, x in enumerate(nu_arr):
        f = np.linalg.solve(op.dyn_matrix + 1j * x * eye, inject)
        wts = np.array([occ(x) + 0.5, occ(-x) + 0.5, 0.5, 0.5])
        fq, fp = f[0], f[1]
        out["Sq"][i] = np.sum(np.abs(fq) ** 2 * wts)
        out["Sp"][i] = np.sum(np.abs(fp) ** 2 * wts)
        out["Sqp"][i] = np.real(np.sum(fq * np.conj(fp) * wts))
        out["Sq_rp"][i] = np.sum(np.abs(fq[2:]) ** 2 * wts[2:])
        out["Sq_th"][i] = np.sum(np.abs(fq[:2]) ** 2 * wts[:2])
    if np.ndim(nu) == 0:
        return {k: float(v[0]) for k, v in out.items()}
    return out


def pole_features(op: OperatingPoint) -> list[tuple[float, float]]:
    """``(center, half-width)`` pairs for every zero of ``d`` plus the origin."""
    feats = [(float(abs(r.real)), float(max(abs(r.imag), 1e-300))) for r in op.char_poly.roots()]
    feats.append((0.0, op.damped_frequency))
    return feats


def _integrate(op, f, cfg):
    return integrate_real_line(f, cfg, features=pole_features(op), scale=op.damped_frequency)[0]


def moment_integrals(op: OperatingPoint, spec: OccupationSpectrum | None = None,
                     cfg: QuadratureConfig | None = None) -> EquilibriumMoments:
    """Stationary SI second moments by quadrature of the spectra.

    ``<q^2> - <q>^2 = hbar/(m Omega) (1/2pi) int S_q``, ``<p^2> = m hbar Omega
    (1/2pi) int S_p`` and ``<{q,p}>/2 = hbar (1/2pi) int S_qp``.  The
    static displacement ``mean_q_shift`` is reported as ``mean_q``.

    Raises
    ------
    InstabilityError
    QuadratureError
    """
    _require_stable(op)
    m, om = op.mech.mass, op.bare_frequency
    iq = _integrate(op, lambda x: sq_total(op, spec, x), cfg) / (2 * np.pi)
    ip = _integrate(op, lambda x: sp_total(op, spec, x), cfg) / (2 * np.pi)
    iqp = _integrate(op, lambda x: sqp_th(op, spec, x), cfg) / (2 * np.pi)
    return EquilibriumMoments(
        q2=HBAR / (m * om) * iq,
        p2=m * HBAR * om * ip,
        qp_sym=HBAR * iqp,
        mean_q=op.mean_q_shift,
    )


def lyapunov_moments(op: OperatingPoint) -> EquilibriumMoments:
    """Same moments from the steady-state covariance (flat spectra only)."""
    from .numerics import lyapunov_steady

    _require_stable(op)
    if op.noise_matrix is None:
        raise DomainError("steady-state covariance needs a flat occupation spectrum")
    cov = lyapunov_steady((op.dyn_matrix, op.noise_matrix))
    m, om = op.mech.mass, op.bare_frequency
    return EquilibriumMoments(
        q2=HBAR / (m * om) * cov[0, 0],
        p2=m * HBAR * om * cov[1, 1],
        qp_sym=HBAR * cov[0, 1],
        mean_q=op.mean_q_shift,
    )


def velocity_moment_q(op: OperatingPoint, spec: OccupationSpectrum | None = None):
    """``int nu^2 S_q(nu) dnu``, which does not converge.

    The thermal part decays only like ``nu^-2`` times ``nu^2``, so the
    integrand tends to a nonzero constant.  Always raises.

    Raises
    ------
    DivergentIntegralError
    """
    _require_stable(op)
    big = 1e6 * max(op.damped_frequency, op.gamma_c, abs(op.detuning))
    tail = big**2 * float(sq_total(op, spec, big))
    raise DivergentIntegralError(
        f"nu^2 S_q(nu) tends to {tail:.3e} at large |nu|; its integral diverges"
    )


def auto_grid(op: OperatingPoint, n: int = 2001, *, span: float | None = None,
              symmetric: bool = False, widths: float = 5.0) -> np.ndarray:
    """Frequency grid that resolves every spectral peak.

    Half of the points are spread uniformly on ``[0, span]`` (or
    ``[-span, span]``); the rest are log-spaced offsets within ``widths``
    times each decay rate on both sides of every pole frequency.
    """
    if n < 16:
        raise DomainError("auto grid needs at least 16 points")
    roots = op.char_poly.roots()
    if span is None:
        span = 3 * max(max(abs(r.real) + abs(r.imag) for r in roots), op.damped_frequency)
    lo = -span if symmetric else 0.0
    base = np.linspace(lo, span, n // 2)
    per_pole = max((n - n // 2) // (2 * len(roots)), 2)
    extra = []
    for r in roots:
        centre, gamma = abs(r.real), 2 * abs(r.imag)
        offs = np.geomspace(gamma * 1e-3, widths * gamma, per_pole)
        for c in ((centre, -centre) if symmetric else (centre,)):
            extra.extend(c + offs)
            extra.extend(c - offs)
            extra.append(c)
    grid = np.unique(np.concatenate([base, np.asarray(extra)]))
    return grid[(grid >= lo) & (grid <= span)]


@dataclass
class SpectrumTable:
    """Frequency grid with named columns and a metadata header.

    Attributes
    ----------
    grid : ndarray
        Strictly increasing frequencies in rad/s.
    columns : dict of str to ndarray
    meta : dict
        Written as a ``# params:`` comment line.
    """

    grid: np.ndarray
    columns: dict = field(default_factory=dict)
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.grid = np.asarray(self.grid, dtype=float)
        if self.grid.ndim != 1 or np.any(np.diff(self.grid) <= 0):
            raise DomainError("grid must be one-dimensional and strictly increasing")
        for name, col in self.columns.items():
            col = np.asarray(col, dtype=float)
            if col.shape != self.grid.shape:
                raise DomainError(f"column {name!r} has shape {col.shape}, grid has {self.grid.shape}")
            self.columns[name] = col

    def __getitem__(self, name):
        return self.columns[name]

    def to_csv(self, target=None, index_name: str = "nu_rad_s") -> str:
        """Write the table; returns the text and also writes ``target`` if given."""
        buf = io.StringIO()
        if self.meta:
            items = ";".join(f"{k}={v}" for k, v in self.meta.items())
            buf.write(f"# params: {items}\n")
        names = list(self.columns)
        buf.write(",".join([index_name, *names]) + "\n")
        data = np.column_stack([self.grid, *(self.columns[k] for k in names)])
        np.savetxt(buf, data, fmt="%.12e", delimiter=",")
        text = buf.getvalue()
        if target is not None:
            if hasattr(target, "write"):
                target.write(text)
            else:
                Path(target).write_text(text)
        return text

    @classmethod
    def from_csv(cls, source) -> "SpectrumTable":
        text = Path(source).read_text() if not hasattr(source, "read") else source.read()
        lines = text.splitlines()
        meta = {}
        while lines and lines[0].startswith("#"):
            head = lines.pop(0)
            if head.startswith("# params:"):
                for item in head[len("# params:"):].strip().split(";"):
                    if "=" in item:
                        k, v = item.split("=", 1)
                        meta[k.strip()] = v.strip()
        names = lines[0].split(",")
        data = np.loadtxt(io.StringIO("\n".join(lines[1:])), delimiter=",", ndmin=2)
        return cls(data[:, 0], {k: data[:, i + 1] for i, k in enumerate(names[1:])}, meta)


def spectrum_table(op: OperatingPoint, grid, spec: OccupationSpectrum | None = None) -> SpectrumTable:
    """Evaluate every closed-form spectrum on ``grid``."""
    grid = np.asarray(grid, dtype=float)
    rp = np.asarray(sq_rp(op, spec, grid))
    th = np.asarray(sq_th(op, spec, grid))
    pth = np.asarray(sp_th(op, spec, grid))
    cols = {
        "Sq_rp": rp,
        "Sq_th": th,
        "Sp_th": pth,
        "Sqp_th": np.asarray(sqp_th(op, spec, grid)),
        "Sq_total": rp + th,
        "Sp_total": (grid / op.bare_frequency) ** 2 * rp + pth,
    }
    return SpectrumTable(grid, cols, op.params.describe() | {"detuning_rad_s": op.detuning,
                                                            "coupling_rad_s": op.coupling})
