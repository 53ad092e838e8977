import pytest
from hypothesis import given
from hypothesis import strategies as st

from leias.model import (
    AlertAction,
    AlertLevel,
    EmptyRouteError,
    ErrorRange,
    NonIntegralDeadlineError,
    QTable,
    RangeThresholds,
    SensorKind,
    ThresholdOrderError,
)
from leias.reliability import classify

from conftest import make_config


class TestValidateConfig:
    def test_defaults_accepted(self):
        cfg = make_config()
        assert cfg.thresholds == RangeThresholds(3, 9, 15)
        assert cfg.window_ticks == 5

    def test_threshold_order_violation(self):
        with pytest.raises(ThresholdOrderError):
            make_config(thresholds={"t1": 9, "t2": 9, "t3": 15})

    def test_integral_deadline_accepted(self):
        assert make_config(tick_hz=3, response_window_s=5).window_ticks == 15

    def test_non_integral_deadline_rejected(self):
        with pytest.raises(NonIntegralDeadlineError):
            make_config(tick_hz=0.3, response_window_s=5)

    def test_empty_route_rejected(self):
        with pytest.raises(EmptyRouteError):
            make_config(waypoints=[])


class TestSensorOrder:
    def test_exactly_three_in_tiebreak_order(self):
        assert list(SensorKind) == [SensorKind.GPS, SensorKind.LIDAR, SensorKind.IMU]
        assert SensorKind.GPS < SensorKind.LIDAR < SensorKind.IMU

    def test_error_range_total_order(self):
        assert (
            ErrorRange.NORMAL < ErrorRange.LEVEL1 < ErrorRange.LEVEL2 < ErrorRange.SAFETY
        )


class TestQTable:
    def test_twelve_entries_all_zero(self):
        q = QTable()
        assert len(QTable.DOMAIN) == 12
        assert all(v == 0.0 for v in q.to_json_dict().values())

    def test_domain_closure_on_read(self):
        with pytest.raises(KeyError):
            QTable().value("bogus", AlertLevel.LOW, AlertAction.WARN)

    def test_domain_closure_on_write(self):
        with pytest.raises(KeyError):
            QTable({("bogus",): 1.0})

    def test_update_is_persistent(self):
        q = QTable()
        q2 = q.with_value(SensorKind.GPS, AlertLevel.LOW, AlertAction.WARN, 0.5)
        assert q.value(SensorKind.GPS, AlertLevel.LOW, AlertAction.WARN) == 0.0
        assert q2.value(SensorKind.GPS, AlertLevel.LOW, AlertAction.WARN) == 0.5

    def test_json_round_trip(self):
        q = QTable().with_value(SensorKind.IMU, AlertLevel.HIGH, AlertAction.DO_NOT_WARN, -0.25)
        assert QTable.from_json_dict(q.to_json_dict()) == q


@given(
    error=st.floats(min_value=0, max_value=1e6, allow_nan=False),
    t1=st.floats(min_value=0.1, max_value=10),
    gap1=st.floats(min_value=0.1, max_value=10),
    gap2=st.floats(min_value=0.1, max_value=10),
)
def test_classify_total(error, t1, gap1, gap2):
    thresholds = RangeThresholds(t1, t1 + gap1, t1 + gap1 + gap2).validate()
    assert classify(error, thresholds) in ErrorRange
