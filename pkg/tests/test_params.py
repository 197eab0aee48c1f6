import math

import numpy as np
import pytest

from optomech.errors import ConfigError, DomainError, OverdampedError
from optomech.params import (
    HBAR,
    K_B,
    MechanicalParams,
    ThermalEnv,
    damped_frequency,
    load_config,
    mode_phase_tau,
    parse_config_text,
    parse_frequency,
    planck_occupation,
    preset_p0,
)


def test_zero_damping_keeps_bare_frequency():
    mech = MechanicalParams(1.0, 1.0, 1e-300)
    assert damped_frequency(mech) == 1.0
    assert mode_phase_tau(mech) == pytest.approx(1.0, abs=1e-15)


def test_overdamped_boundary_rejected():
    with pytest.raises(OverdampedError):
        MechanicalParams(1.0, 1.0, 2.0)


@pytest.mark.parametrize("field", ["mass", "bare_frequency", "damping"])
def test_nonpositive_inputs_rejected(field):
    kw = {"mass": 1.0, "bare_frequency": 1.0, "damping": 0.1, field: 0.0}
    with pytest.raises(DomainError):
        MechanicalParams(**kw)


def test_preset_damped_frequency():
    mech = preset_p0().mech
    # independent 40-digit evaluation
    assert mech.damped_frequency == pytest.approx(62831853.07101046660585051, rel=1e-15)
    assert 1 - mech.damped_frequency / mech.bare_frequency == pytest.approx(1.25e-11, rel=1e-4)
    assert mech.frequency_gap == pytest.approx(mech.bare_frequency * 1.2500000000078125e-11, rel=1e-12)


def test_tau_modulus_and_signs():
    rng = np.random.default_rng(1)
    for _ in range(200):
        om = 10 ** rng.uniform(-2, 9)
        mech = MechanicalParams(1.0, om, om * rng.uniform(1e-6, 1.99))
        tau = mode_phase_tau(mech)
        assert abs(abs(tau) - 1) < 1e-14
        assert tau.real > 0 and tau.imag < 0


def test_tau_imaginary_part_on_preset():
    assert mode_phase_tau(preset_p0().mech).imag == pytest.approx(-5e-6, rel=1e-12)


def test_reconstruction_identity():
    rng = np.random.default_rng(2)
    for _ in range(200):
        om = 10 ** rng.uniform(-3, 9)
        gm = om * rng.uniform(1e-6, 1.99)
        w = MechanicalParams(1.0, om, gm).damped_frequency
        assert w < om
        assert (w * w + gm * gm / 4) == pytest.approx(om * om, rel=1e-13)


def test_planck_zero_temperature_and_ln2():
    w = 2 * math.pi * 1e7
    assert planck_occupation(ThermalEnv.zero_temperature(), w) == 0.0
    env = ThermalEnv(math.log(2) / (HBAR * w))
    assert planck_occupation(env, w) == pytest.approx(1.0, rel=1e-14)


def test_planck_room_temperature_oracle():
    # 40-digit evaluation of 1/(exp(hbar w / k_B T) - 1)
    env = ThermalEnv.from_temperature(300.0)
    assert planck_occupation(env, 2 * math.pi * 1e7) == pytest.approx(625098.07408297039452, rel=1e-12)


def test_planck_monotone():
    w = np.geomspace(1e3, 1e13, 50)
    n = planck_occupation(ThermalEnv.from_temperature(4.0), w)
    assert np.all(np.diff(n) < 0)
    temps = np.geomspace(0.01, 1e4, 50)
    by_beta = [planck_occupation(ThermalEnv(1 / (K_B * t)), 1e9) for t in temps[::-1]]
    assert np.all(np.diff(by_beta) < 0)


def test_planck_rejects_nonpositive_frequency():
    with pytest.raises(DomainError):
        planck_occupation(ThermalEnv.from_temperature(1.0), 0.0)


def test_frequency_units():
    assert parse_frequency("1e7 Hz") == pytest.approx(2 * math.pi * 1e7)
    assert parse_frequency("6.5e7 rad/s") == 6.5e7
    assert parse_frequency("5e7") == 5e7
    with pytest.raises(ConfigError):
        parse_frequency("fast")


def test_config_roundtrip(tmp_path):
    path = tmp_path / "p.cfg"
    path.write_text(
        "# canonical set written by hand\n"
        "m_kg = 2.5e-10\n"
        "omega_m_hz = 1e7\n"
        "gamma_m_hz = 100\n"
        "omega_c = 1.7704e15\n"
        "gamma_c = 5e7\n"
        "length_m = 5e-4\n"
        "laser_power_w = 0.05\n"
        "temperature_k = 300\n"
    )
    p = load_config(path)
    assert p.mech.bare_frequency == pytest.approx(2 * math.pi * 1e7)
    assert p.mech.damping == pytest.approx(2 * math.pi * 100)
    assert p.laser.frequency == p.cavity.resonance
    assert p.env.temperature == pytest.approx(300.0)


@pytest.mark.parametrize("text", [
    "m_kg 1",
    "bogus = 1",
    "m_kg = 1\nm_kg = 2",
    "m_kg = x",
    "zero_temp = maybe",
])
def test_config_errors(text):
    with pytest.raises(ConfigError):
        parse_config_text(text)


def test_config_temperature_choice_is_exclusive(tmp_path):
    path = tmp_path / "p.cfg"
    path.write_text("temperature_k = 3\nzero_temp = true\n")
    with pytest.raises(ConfigError):
        load_config(path, preset_p0())


def test_config_overlays_base(tmp_path):
    path = tmp_path / "p.cfg"
    path.write_text("gamma_c = 3e8\nzero_temp = yes\n")
    p = load_config(path, preset_p0())
    assert p.cavity.decay == 3e8
    assert p.env.is_zero_temperature
    assert p.mech == preset_p0().mech


def test_drive_amplitude():
    p = preset_p0()
    e2 = p.laser.power * p.cavity.decay / (HBAR * p.laser.frequency)
    assert p.drive_amplitude**2 == pytest.approx(e2, rel=1e-14)
