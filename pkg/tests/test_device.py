import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from saw_mzi import (
    CONSTANTS,
    ConfigError,
    DeviceParams,
    DomainError,
    QubitState,
    TunnelSpec,
    ab_field_for_2pi,
    ab_phase,
    bs_unitary,
    efield_phase,
    load_device_params,
    max_gate_length,
    shot_noise_relative,
    thermal_energy,
    transit_time,
    tunnel_angle,
)

# Exact SI values (2019 redefinition), independent of scipy.
E = 1.602176634e-19
H = 6.62607015e-34
KB = 1.380649e-23

pos = st.floats(1e-9, 1e3)


def test_constants_are_exact_si():
    assert CONSTANTS.e == E
    assert CONSTANTS.h == H
    assert CONSTANTS.k_B == KB
    assert CONSTANTS.hbar == pytest.approx(H / (2 * math.pi), rel=1e-15)


class TestTransit:
    def test_values(self):
        assert transit_time(0.0, 2700.0) == 0.0
        assert transit_time(6e-6, 2700.0) == pytest.approx(2.2222222222222222e-9, rel=1e-14)
        assert transit_time(300e-9, 2700.0) == pytest.approx(1.1111111111111111e-10, rel=1e-14)

    @pytest.mark.parametrize("length,v", [(1.0, 0.0), (1.0, -5.0), (-1.0, 2700.0)])
    def test_invalid(self, length, v):
        with pytest.raises(DomainError):
            transit_time(length, v)


class TestElectricPhase:
    def test_zero_field(self):
        assert efield_phase(0.0, 1e-7, 1e-7, 2700.0) == 0.0

    def test_two_pi_at_gate_limit(self):
        d = 100e-9
        l = 1.1166302781694418e-07
        assert efield_phase(100e-6 / d, d, l, 2700.0) == pytest.approx(2 * math.pi, rel=1e-12)

    def test_linear_in_length(self):
        a = efield_phase(300.0, 1e-7, 1e-7, 2700.0)
        assert efield_phase(300.0, 1e-7, 2e-7, 2700.0) == pytest.approx(2 * a, rel=1e-15)

    @pytest.mark.parametrize("d,l,v", [(0.0, 1e-7, 2700.0), (1e-7, -1e-7, 2700.0), (1e-7, 1e-7, 0.0)])
    def test_bad_geometry(self, d, l, v):
        with pytest.raises(DomainError):
            efield_phase(1.0, d, l, v)

    @given(st.floats(-1e4, 1e4), pos, pos, pos)
    def test_factorises_through_transit_time(self, e_field, d, l, v):
        direct = efield_phase(e_field, d, l, v)
        via_voltage = CONSTANTS.e * (e_field * d) * transit_time(l, v) / CONSTANTS.hbar
        assert direct == pytest.approx(via_voltage, rel=1e-12, abs=1e-300)


class TestGateLength:
    def test_headline_value(self):
        assert max_gate_length(100e-6, 2700.0) == pytest.approx(1.1166302781694418e-07, rel=1e-12)

    def test_inverse_proportional(self):
        assert max_gate_length(200e-6, 2700.0) == pytest.approx(max_gate_length(100e-6, 2700.0) / 2, rel=1e-15)

    def test_one_metre(self):
        assert max_gate_length(1.1166302781694418e-11, 2700.0) == pytest.approx(1.0, rel=1e-12)

    def test_invalid(self):
        with pytest.raises(DomainError):
            max_gate_length(0.0, 2700.0)

    @given(st.floats(1e-7, 1e-2), st.floats(100.0, 1e4), st.floats(1e-9, 1e-6))
    def test_inverse_of_efield_phase(self, v_min, v_saw, d):
        l = max_gate_length(v_min, v_saw)
        assert efield_phase(v_min / d, d, l, v_saw) == pytest.approx(2 * math.pi, rel=1e-12)


class TestAharonovBohm:
    def test_zero_field(self):
        assert ab_phase(0.0, 0.2e-12) == 0.0

    def test_headline_field(self):
        assert ab_field_for_2pi(0.2e-12) == pytest.approx(0.020678338484619293, rel=1e-12)
        assert ab_field_for_2pi(0.4e-12) == pytest.approx(0.010339169242309647, rel=1e-12)
        assert ab_phase(0.020678338484619293, 0.2e-12) == pytest.approx(2 * math.pi, rel=1e-12)

    @given(st.floats(1e-16, 1e-6))
    def test_round_trip(self, area):
        assert ab_phase(ab_field_for_2pi(area), area) == pytest.approx(2 * math.pi, rel=1e-12)

    def test_bilinear(self):
        base = ab_phase(0.01, 1e-13)
        assert ab_phase(0.02, 1e-13) == pytest.approx(2 * base, rel=1e-15)
        assert ab_phase(0.01, 3e-13) == pytest.approx(3 * base, rel=1e-15)

    def test_invalid(self):
        with pytest.raises(DomainError):
            ab_field_for_2pi(0.0)
        with pytest.raises(DomainError):
            ab_phase(0.1, -1.0)


class TestTunnelAngle:
    V = 2700.0

    def _gap_for(self, delta, theta):
        return theta * CONSTANTS.hbar / delta * self.V

    def test_no_tunnelling(self):
        spec = tunnel_angle(TunnelSpec(0.0), 300e-9, self.V)
        assert spec.theta == 0.0 and spec.wraps == 0

    def test_fifty_fifty(self):
        delta = 1e-24
        spec = tunnel_angle(TunnelSpec(delta), self._gap_for(delta, math.pi / 4), self.V)
        assert spec.theta == pytest.approx(math.pi / 4, rel=1e-12)
        assert spec.transmittance == pytest.approx(0.5, abs=1e-12)
        assert spec.gamma == -math.pi / 2

    def test_amplitudes_match_tunnelling_map(self, rng):
        delta = 2e-24
        for gap in rng.uniform(0, 2e-6, 100):
            raw = delta / CONSTANTS.hbar * gap / self.V
            spec = tunnel_angle(TunnelSpec(delta), gap, self.V)
            u = bs_unitary(spec)
            assert abs(u.u00) ** 2 + abs(u.u10) ** 2 == pytest.approx(1.0, abs=1e-12)
            out = u.apply(QubitState.zero()).vector
            want = np.array([math.cos(raw), -1j * math.sin(raw)])
            # equal up to a global phase
            overlap = abs(np.vdot(want, out))
            assert overlap == pytest.approx(1.0, abs=1e-12)
            assert spec.wraps == int(raw // (math.pi / 2))

    def test_wrapped_rotation_reported(self):
        delta = 1e-24
        spec = tunnel_angle(TunnelSpec(delta), self._gap_for(delta, math.pi - 0.3), self.V)
        assert spec.wraps == 1
        assert spec.theta == pytest.approx(0.3, rel=1e-10)
        assert spec.gamma == math.pi / 2

    def test_invalid(self):
        with pytest.raises(DomainError):
            tunnel_angle(TunnelSpec(1e-24), -1.0, self.V)
        with pytest.raises(DomainError):
            TunnelSpec(-1.0)


class TestThermalAndShotNoise:
    def test_thermal(self):
        assert thermal_energy(0.0) == 0.0
        assert thermal_energy(0.1) == pytest.approx(8.617333262145177e-06, rel=1e-12)
        assert thermal_energy(1.0) == pytest.approx(8.617333262145177e-05, rel=1e-12)

    def test_shot_noise(self):
        assert shot_noise_relative(1.0, 1.0) == 1.0
        assert shot_noise_relative(3e9, 1.0) == pytest.approx(1.8257418583505537e-05, rel=1e-12)
        assert shot_noise_relative(3e9, 4e-3) == pytest.approx(shot_noise_relative(3e9, 1e-3) / 2, rel=1e-14)

    @pytest.mark.parametrize("f,dt", [(0.0, 1.0), (1.0, 0.0), (-1.0, 1.0)])
    def test_shot_noise_invalid(self, f, dt):
        with pytest.raises(DomainError):
            shot_noise_relative(f, dt)


class TestDeviceConfig:
    def test_load(self, tmp_path):
        p = tmp_path / "dev.cfg"
        p.write_text(
            "# device\nv_saw = 2700\nd = 1e-7  # channel separation\narea=0.2e-12\n"
            "temperature: 0.1\nf_saw = 3e9\n"
        )
        params = load_device_params(p)
        assert params == DeviceParams(v_saw=2700.0, d=1e-7, area=0.2e-12, temperature=0.1, f_saw=3e9)
        assert params.require("d", "area") == (1e-7, 0.2e-12)
        with pytest.raises(ConfigError, match="l_phase"):
            params.require("l_phase")

    def test_unknown_key(self, tmp_path):
        p = tmp_path / "dev.cfg"
        p.write_text("v_saw = 2700\nspeed = 3\n")
        with pytest.raises(ConfigError, match="speed"):
            load_device_params(p)

    def test_bad_number(self, tmp_path):
        p = tmp_path / "dev.cfg"
        p.write_text("area = big\n")
        with pytest.raises(ConfigError, match="area"):
            load_device_params(p)

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError):
            load_device_params(tmp_path / "nope.cfg")

    def test_non_positive(self, tmp_path):
        p = tmp_path / "dev.cfg"
        p.write_text("area = 0\n")
        with pytest.raises(DomainError, match="area"):
            load_device_params(p)
