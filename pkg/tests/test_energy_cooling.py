import math

import numpy as np
import pytest

from optomech.bath_spectrum import FlatOccupation, TabulatedOccupation
from optomech.energy_cooling import (
    MAP_COLUMNS,
    EnergyMethod,
    cooling_map,
    energy_quadrature,
    energy_residue,
    equivalent_temperature,
    q_factor_alternative,
    zero_detuning_energy,
)
from optomech.errors import DomainError, InstabilityError
from optomech.optomech_linear import operating_point
from optomech.params import HBAR, K_B, preset_p0
from optomech.pole_analysis import critical_cavity_decay, poles_exact_resonant, poles_numeric

from draws import stable_flat_draws

P = preset_p0()
W = P.mech.damped_frequency


def test_zero_detuning_forms_match_quadrature():
    n = 7.0
    op = operating_point(P, 0.0, FlatOccupation(n))
    z = zero_detuning_energy(op, n)
    q = energy_quadrature(op)
    assert z.m_th == 0.0
    assert z.n_th == n + 0.5
    assert q.n_th == pytest.approx(n + 0.5, rel=1e-7)
    assert abs(q.m_th) < 1e-9 * q.n_th
    assert q.n_rp == pytest.approx(z.n_rp, rel=1e-7)
    assert z.cooling_factor == 1.0


def test_zero_detuning_requires_resonance():
    with pytest.raises(DomainError):
        zero_detuning_energy(operating_point(P, W), 0.0)


def test_uncoupled_limit():
    n = 3.0
    op = operating_point(P, 0.7 * W, FlatOccupation(n), coupling=0.0)
    e = energy_residue(op, n, poles_numeric(op.char_poly))
    assert (e.n_rp, e.q_factor, e.k_factor) == (0.0, 1.0, 0.0)
    assert e.total == pytest.approx(n + 0.5, rel=1e-10)
    q = energy_quadrature(op)
    assert q.n_th == pytest.approx(n + 0.5, rel=1e-7)
    assert q.cooling_factor == pytest.approx(1.0, rel=1e-7)


def test_weak_coupling_approaches_uncoupled():
    op = operating_point(P, 0.7 * W, FlatOccupation(2.0), coupling=1e-3 * P.mech.damping)
    e = energy_residue(op, 2.0, poles_numeric(op.char_poly))
    assert e.cooling_factor == pytest.approx(1.0, rel=1e-4)
    assert e.q_factor == pytest.approx(1.0, rel=1e-4)


def test_draw_invariants():
    for op, occ, poles in stable_flat_draws(25, seed=81):
        e = energy_residue(op, occ, poles)
        assert e.total >= 0.5 * (1 - 1e-9)
        assert e.q_factor > 0
        assert e.n_th > 0 and e.n_rp >= 0
        assert e.fluct_energy == pytest.approx(HBAR * op.damped_frequency * e.total, rel=1e-14)
        assert e.method is EnergyMethod.RESIDUE


def test_structured_bath_quadrature():
    spec = TabulatedOccupation([-2 * W, 0.0, 0.95 * W, 1.05 * W, 3 * W], [0.0, 1.0, 5.0, 5.0, 0.0])
    op = operating_point(P, 0.0, spec)
    e = energy_quadrature(op)
    assert e.n_eff == pytest.approx(5.0, rel=1e-3)
    assert e.n_th == pytest.approx(e.n_eff + 0.5, rel=1e-3)


def test_alternative_q_regression():
    # the alternative closed form is kept only to document its disagreement
    gbar = critical_cavity_decay(P)
    p = P.with_cavity_decay(gbar)
    op = operating_point(p, W, FlatOccupation(0.0))
    poles = poles_exact_resonant(p, op.coupling)
    assert q_factor_alternative(op, poles) == pytest.approx(0.9967, abs=5e-5)
    assert energy_residue(op, 0.0, poles).q_factor == pytest.approx(2.6105203567512523, rel=1e-8)


def test_equivalent_temperature():
    op = operating_point(P, 0.0)
    assert equivalent_temperature(op, 1.0) == pytest.approx(HBAR * W / K_B, rel=1e-15)


def test_unstable_refused():
    op = operating_point(P, -W, coupling=1e9)
    with pytest.raises(InstabilityError):
        energy_quadrature(op)


def test_map_slices():
    gbar = critical_cavity_decay(P)
    gcs = gbar * np.array([1.5, 3.0, 6.0, 12.0])
    m = cooling_map(P, None, [1e-7 * W, 1e-6 * W, W], gcs)
    c = m.grid()
    assert np.all(m.stable)
    # near resonance the laser barely acts and 1 - C shrinks linearly with Delta
    assert np.all(np.abs(c[0] - 1) < 5e-3)
    assert np.allclose((1 - c[1]) / (1 - c[0]), 10, rtol=0.05)
    # at Delta = omega a broader cavity cools less
    assert np.all(np.diff(c[2]) > 0)


def test_map_marks_unstable_rows():
    m = cooling_map(P, FlatOccupation(1.0), [-W, W], [5e6])
    assert list(m.stable) == [False, True]
    assert m.pole_method[0] == "unstable"
    assert math.isnan(m.cooling_factor[0]) and math.isfinite(m.cooling_factor[1])
    d, g, c = m.argmin()
    assert (d, g) == (W, 5e6) and c == m.cooling_factor[1]


def test_map_csv(tmp_path):
    m = cooling_map(P, None, [0.5 * W, W], [1e7, 1e8])
    text = m.to_csv(tmp_path / "map.csv")
    lines = text.splitlines()
    assert lines[0].startswith("# params: ")
    assert lines[1] == ",".join(MAP_COLUMNS)
    assert len(lines) == 6
    assert (tmp_path / "map.csv").read_text() == text


def test_map_rejects_unknown_method():
    with pytest.raises(DomainError):
        cooling_map(P, None, [W], [1e7], method="guess")
