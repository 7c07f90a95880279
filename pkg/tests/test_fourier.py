"""Fourier-engine tests: reference Lewis columns, damping rules, stability."""

import math

import pytest

from vgpricer.errors import DampingOutOfRangeError, InvalidParameters
from vgpricer.fourier import (
    FourierConfig,
    a_max,
    carr_madan_european,
    lewis_asset_or_nothing,
    lewis_cash_or_nothing,
)
from vgpricer.model import VgParams
from vgpricer.reference import load_reference
from vgpricer.series import SeriesControl, asset_or_nothing, european
from vgpricer.tables import atm_spot, base_params

from conftest import make_market

_TAUS = {"2": 2.0, "0.5": 0.5}


def _lewis_cells(table: str):
    return [
        c
        for c in load_reference().values()
        if c.table == table and c.col_label == "lewis" and not c.suspect
    ]


class TestLewisDigitals:
    def test_cash_or_nothing_reference_column(self, bench_params):
        for cell in _lewis_cells("1"):
            tau = _TAUS[cell.row_label.split(",")[0].split("=")[1]]
            label = cell.row_label.split(",")[1]
            spot = atm_spot(bench_params, tau) if label == "ATM" else float(label.split("=")[1])
            value = lewis_cash_or_nothing(bench_params, make_market(spot, tau)).value
            assert value == pytest.approx(cell.value, abs=5e-4), cell

    def test_asset_or_nothing_reference_column(self, bench_params):
        for cell in _lewis_cells("2"):
            tau = _TAUS[cell.row_label.split(",")[0].split("=")[1]]
            label = cell.row_label.split(",")[1]
            spot = atm_spot(bench_params, tau) if label == "ATM" else float(label.split("=")[1])
            value = lewis_asset_or_nothing(bench_params, make_market(spot, tau)).value
            assert value == pytest.approx(cell.value, abs=0.05), cell

    def test_drifted_cash_or_nothing_reference_column(self):
        for cell in _lewis_cells("4"):
            theta = float(cell.row_label.split(",")[0].split("=")[1])
            params = base_params(theta)
            label = cell.row_label.split(",")[1]
            spot = atm_spot(params, 2.0) if label == "ATM" else float(label.split("=")[1])
            value = lewis_cash_or_nothing(params, make_market(spot, 2.0)).value
            assert value == pytest.approx(cell.value, abs=5e-4), cell

    def test_deep_itm_saturates_to_spot(self, bench_params):
        spot = 1e6
        value = lewis_asset_or_nothing(bench_params, make_market(spot, 2.0)).value
        assert 0.99 <= value / spot <= 1.01

    def test_truncation_point_already_converged(self, bench_params):
        market = make_market(4200.0, 2.0)
        base = lewis_cash_or_nothing(bench_params, market, FourierConfig(u_max=1e4)).value
        double = lewis_cash_or_nothing(bench_params, market, FourierConfig(u_max=2e4)).value
        assert abs(double - base) < 1e-8

    def test_atm_moneyness_integrand_is_regular(self, bench_params):
        # rn moneyness exactly zero: the u -> 0 endpoint must stay finite
        spot = atm_spot(bench_params, 2.0)
        value = lewis_cash_or_nothing(bench_params, make_market(spot, 2.0)).value
        assert math.isfinite(value)
        assert value == pytest.approx(math.exp(-0.02) / 2.0, abs=5e-4)

    def test_agreement_with_series(self, bench_params):
        ctrl = SeriesControl(max_order=30)
        for spot, tau in ((3800.0, 2.0), (4200.0, 0.5), (5000.0, 2.0)):
            market = make_market(spot, tau)
            series_value = asset_or_nothing(bench_params, market, ctrl).value
            lewis_value = lewis_asset_or_nothing(bench_params, market).value
            # the complement-of-the-event identity: both digital halves add to S
            assert abs(series_value - lewis_value) / spot < 1e-6


class TestCarrMadan:
    def test_damping_bound_value(self):
        bound = a_max(VgParams(sigma=0.2, nu=0.85))
        assert bound == pytest.approx(math.sqrt(2.0 / 0.85) / 0.2 - 1.0, rel=1e-14)
        assert bound == pytest.approx(6.6696, abs=1e-4)

    def test_damping_bound_requires_symmetry(self):
        with pytest.raises(InvalidParameters):
            a_max(VgParams(sigma=0.2, nu=0.85, theta=0.1))

    def test_high_volatility_shrinks_damping_window(self):
        """Near the parameter-validity edge the admissible window vanishes.

        sigma^2 nu -> 2 pushes a_max to 0+ (the bound cannot go negative for
        a valid parameter triple, since validity requires sigma^2 nu < 2),
        and the default damping a = 1 must be rejected.
        """
        params = VgParams(sigma=1.2, nu=1.38)
        assert 0.0 < a_max(params) < 0.01
        with pytest.raises(DampingOutOfRangeError):
            carr_madan_european(params, make_market(4200.0, 2.0))

    def test_damping_out_of_range_rejected(self, bench_params):
        market = make_market(4200.0, 2.0)
        with pytest.raises(DampingOutOfRangeError):
            carr_madan_european(bench_params, market, FourierConfig(damping_a=7.0))

    def test_damping_invariance(self, bench_params):
        market = make_market(4200.0, 2.0)
        values = [
            carr_madan_european(bench_params, market, FourierConfig(damping_a=a)).value
            for a in (0.5, 1.0, 2.0)
        ]
        assert max(values) - min(values) < 1e-6

    def test_agreement_with_series(self, bench_params):
        market = make_market(4200.0, 2.0)
        series_value = european(bench_params, market, SeriesControl(max_order=25)).value
        cm_value = carr_madan_european(bench_params, market).value
        assert abs(series_value - cm_value) < 5e-3

    def test_drifted_model_supported_with_probe(self):
        params = VgParams(sigma=0.2, nu=0.85, theta=-0.1)
        market = make_market(4200.0, 2.0)
        value = carr_madan_european(params, market).value
        assert 400.0 < value < 900.0

    def test_config_validation(self):
        with pytest.raises(InvalidParameters):
            FourierConfig(u_max=-1.0)
        with pytest.raises(InvalidParameters):
            FourierConfig(panels=0)
