import json
import math
from pathlib import Path

import numpy as np
import pytest
from scipy.integrate import quad

from optomech.bath_spectrum import FlatOccupation
from optomech.detection import (
    count_peaks,
    elastic_weight_heterodyne,
    elastic_weight_homodyne,
    heterodyne_elastic_lineshape,
    heterodyne_radiation,
    heterodyne_spectrum,
    heterodyne_thermal,
    homodyne_coefficients,
    homodyne_from_coefficients,
    homodyne_spectrum,
    homodyne_thermal,
    squeezing_scan,
)
from optomech.errors import DomainError, InstabilityError
from optomech.fluctuation_spectra import sq_total
from optomech.optomech_linear import operating_point
from optomech.params import preset_p0

P = preset_p0()
W = P.mech.damped_frequency
NU = np.linspace(-3 * W, 3 * W, 121)
FIXTURE = json.loads((Path(__file__).parent / "fixtures" / "squeezing.json").read_text())


def _squeezing_op():
    p = preset_p0(temperature=0.0, gamma_c=FIXTURE["gamma_c_rad_s"]).with_power(FIXTURE["laser_power_w"])
    return operating_point(p, 0.0, FlatOccupation(0.0))


def test_uncoupled_coefficients():
    op = operating_point(P, 0.6 * W, coupling=0.0)
    e_th, e_em, _ = homodyne_coefficients(op, NU, 0.4)
    assert np.all(e_th == 0)
    assert np.allclose(np.abs(e_em), 1.0, rtol=1e-14)
    res = homodyne_spectrum(op, None, 0.4, NU)
    assert np.allclose(res.s_inel, 1.0, rtol=1e-14)


@pytest.mark.parametrize("theta", [0.0, 0.7, math.pi / 2, 2.5])
def test_coefficient_identities(theta):
    op = operating_point(P, 0.8 * W, FlatOccupation(2.0))
    e1, f1, l1 = homodyne_coefficients(op, NU, theta)
    e2, f2, l2 = homodyne_coefficients(op, -NU, theta)
    lhs = np.abs(e1) ** 2 - np.abs(e2) ** 2 + np.abs(f1) ** 2 - np.abs(f2) ** 2
    assert np.max(np.abs(lhs)) < 1e-10 * np.max(np.abs(f1) ** 2)
    assert np.allclose(l2, np.conj(l1), rtol=1e-13)


def test_closed_forms_agree_with_coefficient_assembly():
    op = operating_point(P, 0.8 * W, FlatOccupation(2.0))
    for theta in np.linspace(-math.pi, math.pi, 9):
        res = homodyne_spectrum(op, None, theta, NU, cross_check=False)
        c_th, c_rp = homodyne_from_coefficients(op, None, NU, theta)
        assert np.allclose(res.s_th, c_th, rtol=1e-10, atol=1e-12)
        assert np.allclose(res.s_rp, c_rp, rtol=1e-10)


def test_resonant_amplitude_quadrature_is_shot_noise():
    op = operating_point(P, 0.0, FlatOccupation(100.0))
    res = homodyne_spectrum(op, None, math.pi / 2, NU)
    assert np.allclose(res.s_inel, 1.0, rtol=1e-12)
    e2 = abs(op.cavity_amp) ** 2 * op.gamma_c**2 / 4
    assert res.elastic_weight == pytest.approx(32 * math.pi * e2 / op.gamma_c, rel=1e-12)
    assert elastic_weight_homodyne(op, 0.0) == 0.0


def test_resonant_phase_quadrature():
    op = operating_point(P, 0.0, FlatOccupation(5.0))
    gc = op.gamma_c
    expect = 1 + 2 * gc * W * op.coupling**2 * np.asarray(sq_total(op, None, NU)) / (
        P.mech.bare_frequency * (gc * gc / 4 + NU**2))
    assert np.allclose(homodyne_spectrum(op, None, 0.0, NU).s_inel, expect, rtol=1e-11)


def test_thermal_part_linear_in_occupation():
    a = operating_point(P, 0.8 * W, FlatOccupation(1e3))
    b = a.with_occupation(FlatOccupation(2e3))
    ta, tb = (np.asarray(homodyne_thermal(o, None, NU, 0.3)) for o in (a, b))
    assert np.allclose(tb / ta, 2000.5 / 1000.5, rtol=1e-12)


def test_heisenberg_product():
    op = _squeezing_op()
    for theta in np.linspace(0, math.pi, 7):
        s = homodyne_spectrum(op, None, theta, NU).s_inel
        s_perp = homodyne_spectrum(op, None, theta + math.pi / 2, NU).s_inel
        assert np.all(s * s_perp >= 1 - 1e-12)


def test_squeezing_scan():
    op = _squeezing_op()
    grid = np.linspace(-0.2 * W, 0.2 * W, 41)
    below = squeezing_scan(op, None, FIXTURE["theta_rad"], grid)
    assert below and all(s < 1 for _, s in below)
    assert squeezing_scan(op, None, math.pi / 4, grid) == []
    hot = op.with_occupation(FlatOccupation(1e5))
    assert squeezing_scan(hot, None, FIXTURE["theta_rad"], grid) == []


def test_heterodyne_sum_identity():
    op = operating_point(P, 0.8 * W, FlatOccupation(3.0))

    def het(x):
        return np.asarray(heterodyne_thermal(op, None, x)) + np.asarray(heterodyne_radiation(op, x))

    for theta in (0.0, 0.4, 1.3):
        s = homodyne_spectrum(op, None, theta, NU).s_inel
        s_perp = homodyne_spectrum(op, None, theta + math.pi / 2, NU).s_inel
        assert np.allclose(het(NU) + het(-NU), s + s_perp, rtol=1e-9)
    assert np.all(het(NU) > 1)
    # elastic weights obey the same sum
    total = elastic_weight_homodyne(op, 0.4) + elastic_weight_homodyne(op, 0.4 + math.pi / 2)
    assert 2 * elastic_weight_heterodyne(op) == pytest.approx(total, rel=1e-13)


@pytest.mark.parametrize("kappa", [1e2, 1e4, 1e6])
def test_elastic_line_integrates_to_weight(kappa):
    op = operating_point(P, 0.8 * W)
    got = quad(lambda x: heterodyne_elastic_lineshape(op, x, kappa), -np.inf, np.inf, points=None)[0]
    assert got == pytest.approx(elastic_weight_heterodyne(op), rel=1e-8)


def test_elastic_line_rejects_nonpositive_bandwidth():
    op = operating_point(P, 0.8 * W)
    for kappa in (0.0, -1.0):
        with pytest.raises(DomainError):
            heterodyne_elastic_lineshape(op, 0.0, kappa)


def test_heterodyne_spectrum_axes():
    op = operating_point(P, 0.8 * W, FlatOccupation(3.0))
    w0 = P.laser.frequency
    a = heterodyne_spectrum(op, None, None, NU, offsets=True)
    b = heterodyne_spectrum(op, None, w0, w0 + NU)
    assert np.allclose(a.offsets, NU, atol=1e-6 * W)
    assert np.allclose(a.sigma_inel, b.sigma_inel, rtol=1e-6)
    assert a.sigma_el is None
    c = heterodyne_spectrum(op, None, None, NU, kappa=1e3, offsets=True)
    assert c.sigma_el.shape == NU.shape


def test_csv_headers(tmp_path):
    op = operating_point(P, 0.8 * W, FlatOccupation(3.0))
    text = homodyne_spectrum(op, None, 0.3, NU[:5]).to_csv(tmp_path / "h.csv")
    lines = text.splitlines()
    assert lines[0].startswith("# elastic: theta_rad=0.3;elastic_weight=")
    assert lines[1].startswith("# params: ")
    assert lines[2] == "nu_rad_s,s_th,s_rp,s_inel"
    data = np.loadtxt(tmp_path / "h.csv", delimiter=",", comments="#", skiprows=3)
    assert data.shape == (5, 4)
    het = heterodyne_spectrum(op, None, None, NU[:5], offsets=True).to_csv()
    assert "kappa_rad_s=None" in het.splitlines()[0]
    assert het.splitlines()[2] == "mu_rad_s,s_th,s_rp,s_inel"


def test_cross_check_failure_is_reported():
    op = operating_point(P, 0.8 * W, FlatOccupation(3.0))
    with pytest.raises(RuntimeError):
        homodyne_spectrum(op, None, 0.3, NU, tol=-1.0)
    with pytest.raises(RuntimeError):
        heterodyne_spectrum(op, None, None, NU, offsets=True, tol=-1.0)


def test_unstable_refused():
    op = operating_point(P, -W, coupling=1e9)
    with pytest.raises(InstabilityError):
        homodyne_spectrum(op, None, 0.0, NU)
    with pytest.raises(InstabilityError):
        heterodyne_spectrum(op, None, None, NU, offsets=True)


def test_count_peaks():
    x = np.linspace(-10, 10, 2001)
    two = np.exp(-((x - 3) ** 2)) + np.exp(-((x + 3) ** 2))
    assert count_peaks(two) == 2
    assert count_peaks(np.exp(-x**2)) == 1
    assert count_peaks(two + 1e-4 * np.cos(40 * x)) == 2
