"""PSD shapes: evaluation, supports, exact power integrals, CSV loading."""
import numpy as np
import pytest

from gnmodel import (ConfigError, DualPolPsd, RaisedCosinePsd, RectangularPsd,
                     TabulatedPsd)


class TestRectangular:
    def test_values_inside_outside_and_at_edge(self):
        shape = RectangularPsd(center_hz=2e9, bandwidth_hz=10e9, height=1.5)
        assert shape.evaluate(2e9) == 1.5
        assert shape.evaluate(-2.9e9) == 1.5
        assert shape.evaluate(7e9) == 0.0   # edge excluded (open support)
        assert shape.evaluate(-3e9) == 0.0
        assert shape.evaluate(20e9) == 0.0

    def test_power_integral_and_support(self):
        shape = RectangularPsd(center_hz=2e9, bandwidth_hz=10e9, height=1.5)
        assert shape.power_integral() == 1.5 * 10e9
        assert shape.support == (-3e9, 7e9)

    def test_validation(self):
        with pytest.raises(ValueError, match="bandwidth"):
            RectangularPsd(center_hz=0.0, bandwidth_hz=0.0, height=1.0)
        with pytest.raises(ValueError, match="height"):
            RectangularPsd(center_hz=0.0, bandwidth_hz=1.0, height=-1.0)

    def test_zero_height_is_a_valid_empty_shape(self):
        shape = RectangularPsd(center_hz=0.0, bandwidth_hz=1.0, height=0.0)
        assert shape.power_integral() == 0.0
        assert shape.evaluate(0.0) == 0.0


class TestRaisedCosine:
    def test_characteristic_points(self):
        b, r, h = 10e9, 0.4, 2.0
        shape = RaisedCosinePsd(center_hz=0.0, bandwidth_hz=b, rolloff=r,
                                height=h)
        assert shape.evaluate(0.0) == h
        assert shape.evaluate(0.5 * (1 - r) * b) == h          # flat edge
        assert shape.evaluate(0.5 * b) == pytest.approx(h / 2, rel=1e-14)
        assert shape.evaluate(0.5 * (1 + r) * b) == 0.0        # outer edge
        assert shape.evaluate(b) == 0.0

    def test_power_integral_exact_and_matches_numeric(self):
        b, r, h = 10e9, 0.35, 1.7
        shape = RaisedCosinePsd(center_hz=1e9, bandwidth_hz=b, rolloff=r,
                                height=h)
        assert shape.power_integral() == h * b
        f = np.linspace(*shape.support, 200001)
        numeric = np.trapezoid(shape.evaluate(f), f)
        assert numeric == pytest.approx(h * b, rel=1e-8)

    def test_zero_rolloff_degenerates_to_rectangle(self):
        rc = RaisedCosinePsd(center_hz=0.0, bandwidth_hz=8e9, rolloff=0.0,
                             height=1.0)
        rect = RectangularPsd(center_hz=0.0, bandwidth_hz=8e9, height=1.0)
        f = np.linspace(-6e9, 6e9, 101)
        np.testing.assert_array_equal(rc.evaluate(f), rect.evaluate(f))

    def test_validation(self):
        with pytest.raises(ValueError, match="rolloff"):
            RaisedCosinePsd(center_hz=0.0, bandwidth_hz=1.0, rolloff=1.5,
                            height=1.0)


class TestTabulated:
    def test_interpolation_and_zero_outside(self):
        shape = TabulatedPsd(frequencies_hz=np.array([-1e9, 0.0, 1e9]),
                             values=np.array([0.0, 2.0, 0.0]))
        assert shape.evaluate(0.0) == 2.0
        assert shape.evaluate(0.5e9) == 1.0
        assert shape.evaluate(2e9) == 0.0
        assert shape.evaluate(-2e9) == 0.0

    def test_power_integral_is_trapezoid(self):
        shape = TabulatedPsd(frequencies_hz=np.array([-1e9, 0.0, 1e9]),
                             values=np.array([0.0, 2.0, 0.0]))
        assert shape.power_integral() == pytest.approx(2e9, rel=1e-14)

    def test_validation(self):
        with pytest.raises(ValueError, match="increasing"):
            TabulatedPsd(frequencies_hz=np.array([0.0, 0.0, 1.0]),
                         values=np.array([1.0, 1.0, 1.0]))
        with pytest.raises(ValueError, match=">= 0"):
            TabulatedPsd(frequencies_hz=np.array([0.0, 1.0]),
                         values=np.array([1.0, -1.0]))
        with pytest.raises(ValueError, match="finite"):
            TabulatedPsd(frequencies_hz=np.array([0.0, 1.0]),
                         values=np.array([1.0, np.inf]))

    def test_from_csv_roundtrip(self, tmp_path):
        path = tmp_path / "shape.csv"
        path.write_text("# f_Hz, value_per_Hz\n-1e9,0.0\n0.0,2.0\n1e9,0.0\n")
        shape = TabulatedPsd.from_csv(path)
        assert shape.evaluate(0.5e9) == 1.0
        assert shape.support == (-1e9, 1e9)

    def test_from_csv_errors(self, tmp_path):
        with pytest.raises(ConfigError, match="cannot read"):
            TabulatedPsd.from_csv(tmp_path / "missing.csv")
        bad = tmp_path / "bad.csv"
        bad.write_text("1.0,2.0\nnot,numbers\n")
        with pytest.raises(ConfigError, match="malformed"):
            TabulatedPsd.from_csv(bad)
        wide = tmp_path / "wide.csv"
        wide.write_text("1.0,2.0,3.0\n2.0,3.0,4.0\n")
        with pytest.raises(ConfigError, match="2 columns"):
            TabulatedPsd.from_csv(wide)


class TestDualPol:
    def test_power_properties(self):
        psd = DualPolPsd(gx=RectangularPsd(0.0, 10e9, 1.0),
                         gy=RectangularPsd(0.0, 5e9, 0.8),
                         p0_w=1e-3)
        assert psd.px_hat == 10e9
        assert psd.py_hat == 4e9
        assert psd.pt_hat_x == 2 * 10e9 + 4e9
        assert psd.pt_hat_y == 2 * 4e9 + 10e9

    def test_swapped_exchanges_roles(self):
        psd = DualPolPsd(gx=RectangularPsd(0.0, 10e9, 1.0),
                         gy=RectangularPsd(1e9, 5e9, 0.8),
                         p0_w=1e-3)
        sw = psd.swapped()
        assert sw.gx is psd.gy and sw.gy is psd.gx
        assert sw.pt_hat_x == psd.pt_hat_y

    def test_rejects_nonpositive_power(self):
        with pytest.raises(ValueError, match="p0"):
            DualPolPsd(gx=RectangularPsd(0.0, 1.0, 1.0),
                       gy=RectangularPsd(0.0, 1.0, 1.0), p0_w=0.0)
